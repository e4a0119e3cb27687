//! Eigenvalues of small dense real matrices.
//!
//! Parlett–Reinsch balancing, reduction to upper Hessenberg form by
//! stabilized elementary similarity transforms, then the Francis
//! double-shift QR iteration. Internally 1-based so the index arithmetic
//! follows the classic EISPACK formulation.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use thiserror::Error;

use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix data has length {len}, expected {n}×{n}")]
    Shape { len: usize, n: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("QR iteration did not converge for eigenvalue {0}")]
    NoConvergence(usize),
}

/// Eigenvalues together with the norm of the balanced matrix, which is the
/// natural scale for deciding whether a real part is "zero".
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub balanced_norm: f64,
}

impl Spectrum {
    pub fn max_real_part(&self) -> f64 {
        self.values
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

const RADIX: f64 = 2.0;
const MAX_ITERATIONS: usize = 60;

struct Work {
    n: usize,
    data: Vec<f64>,
}

impl Work {
    fn from_row_major(entries: &[f64], n: usize) -> Self {
        let mut data = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                data[(i + 1) * (n + 1) + j + 1] = entries[i * n + j];
            }
        }
        Work { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.n + 1) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let n = self.n;
        &mut self.data[i * (n + 1) + j]
    }

    fn swap(&mut self, a: (usize, usize), b: (usize, usize)) {
        let n1 = self.n + 1;
        self.data.swap(a.0 * n1 + a.1, b.0 * n1 + b.1);
    }

    fn balance(&mut self) {
        let n = self.n;
        let sqrdx = RADIX * RADIX;
        let mut done = false;
        while !done {
            done = true;
            for i in 1..=n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 1..=n {
                    if j != i {
                        c += self.at(j, i).abs();
                        r += self.at(i, j).abs();
                    }
                }
                if c != 0.0 && r != 0.0 {
                    let mut g = r / RADIX;
                    let mut f = 1.0;
                    let s = c + r;
                    while c < g {
                        f *= RADIX;
                        c *= sqrdx;
                    }
                    g = r * RADIX;
                    while c > g {
                        f /= RADIX;
                        c /= sqrdx;
                    }
                    if (c + r) / f < 0.95 * s {
                        done = false;
                        let ginv = 1.0 / f;
                        for j in 1..=n {
                            *self.at_mut(i, j) *= ginv;
                        }
                        for j in 1..=n {
                            *self.at_mut(j, i) *= f;
                        }
                    }
                }
            }
        }
    }

    fn norm(&self) -> f64 {
        let mut max_row: f64 = 0.0;
        for i in 1..=self.n {
            let row: f64 = (1..=self.n).map(|j| self.at(i, j).abs()).sum();
            max_row = max_row.max(row);
        }
        max_row
    }

    fn hessenberg(&mut self) {
        let n = self.n;
        for m in 2..n {
            let mut x: f64 = 0.0;
            let mut pivot = m;
            for j in m..=n {
                if self.at(j, m - 1).abs() > x.abs() {
                    x = self.at(j, m - 1);
                    pivot = j;
                }
            }
            if pivot != m {
                for j in (m - 1)..=n {
                    self.swap((pivot, j), (m, j));
                }
                for j in 1..=n {
                    self.swap((j, pivot), (j, m));
                }
            }
            if x != 0.0 {
                for i in (m + 1)..=n {
                    let mut y = self.at(i, m - 1);
                    if y != 0.0 {
                        y /= x;
                        *self.at_mut(i, m - 1) = y;
                        for j in m..=n {
                            let v = self.at(m, j);
                            *self.at_mut(i, j) -= y * v;
                        }
                        for j in 1..=n {
                            let v = self.at(j, i);
                            *self.at_mut(j, m) += y * v;
                        }
                    }
                }
            }
        }
        for i in 3..=n {
            for j in 1..(i - 1) {
                *self.at_mut(i, j) = 0.0;
            }
        }
    }

    #[allow(clippy::many_single_char_names)]
    fn qr(&mut self) -> Result<Vec<Complex64>, EigenError> {
        let n = self.n;
        let mut wr = vec![0.0; n + 1];
        let mut wi = vec![0.0; n + 1];
        let mut anorm = 0.0;
        for i in 1..=n {
            for j in i.saturating_sub(1).max(1)..=n {
                anorm += self.at(i, j).abs();
            }
        }
        let mut nn = n;
        let mut t = 0.0;
        let (mut p, mut q, mut r): (f64, f64, f64);
        let (mut x, mut y, mut z, mut w);
        while nn >= 1 {
            let mut its = 0;
            loop {
                let mut l = nn;
                while l >= 2 {
                    let mut s = self.at(l - 1, l - 1).abs() + self.at(l, l).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if self.at(l, l - 1).abs() + s == s {
                        *self.at_mut(l, l - 1) = 0.0;
                        break;
                    }
                    l -= 1;
                }
                x = self.at(nn, nn);
                if l == nn {
                    wr[nn] = x + t;
                    wi[nn] = 0.0;
                    nn -= 1;
                } else {
                    y = self.at(nn - 1, nn - 1);
                    w = self.at(nn, nn - 1) * self.at(nn - 1, nn);
                    if l == nn - 1 {
                        p = 0.5 * (y - x);
                        q = p * p + w;
                        z = math::sqrt(q.abs());
                        x += t;
                        if q >= 0.0 {
                            z = p + z.copysign(p);
                            wr[nn - 1] = x + z;
                            wr[nn] = x + z;
                            if z != 0.0 {
                                wr[nn] = x - w / z;
                            }
                            wi[nn - 1] = 0.0;
                            wi[nn] = 0.0;
                        } else {
                            wr[nn - 1] = x + p;
                            wr[nn] = x + p;
                            wi[nn - 1] = -z;
                            wi[nn] = z;
                        }
                        nn = nn.saturating_sub(2);
                    } else {
                        if its == MAX_ITERATIONS {
                            return Err(EigenError::NoConvergence(nn));
                        }
                        if its == 10 || its == 20 || its == 40 {
                            // exceptional shift
                            t += x;
                            for i in 1..=nn {
                                *self.at_mut(i, i) -= x;
                            }
                            let s = self.at(nn, nn - 1).abs() + self.at(nn - 1, nn - 2).abs();
                            x = 0.75 * s;
                            y = x;
                            w = -0.4375 * s * s;
                        }
                        its += 1;
                        let mut m = nn - 2;
                        loop {
                            z = self.at(m, m);
                            r = x - z;
                            let s0 = y - z;
                            p = (r * s0 - w) / self.at(m + 1, m) + self.at(m, m + 1);
                            q = self.at(m + 1, m + 1) - z - r - s0;
                            r = self.at(m + 2, m + 1);
                            let s = p.abs() + q.abs() + r.abs();
                            p /= s;
                            q /= s;
                            r /= s;
                            if m == l {
                                break;
                            }
                            let u = self.at(m, m - 1).abs() * (q.abs() + r.abs());
                            let v = p.abs()
                                * (self.at(m - 1, m - 1).abs()
                                    + z.abs()
                                    + self.at(m + 1, m + 1).abs());
                            if u + v == v {
                                break;
                            }
                            m -= 1;
                        }
                        for i in (m + 2)..=nn {
                            *self.at_mut(i, i - 2) = 0.0;
                            if i != m + 2 {
                                *self.at_mut(i, i - 3) = 0.0;
                            }
                        }
                        let mut k = m;
                        while k < nn {
                            if k != m {
                                p = self.at(k, k - 1);
                                q = self.at(k + 1, k - 1);
                                r = 0.0;
                                if k != nn - 1 {
                                    r = self.at(k + 2, k - 1);
                                }
                                x = p.abs() + q.abs() + r.abs();
                                if x != 0.0 {
                                    p /= x;
                                    q /= x;
                                    r /= x;
                                }
                            }
                            let s = math::sqrt(p * p + q * q + r * r).copysign(p);
                            if s != 0.0 {
                                if k == m {
                                    if l != m {
                                        *self.at_mut(k, k - 1) = -self.at(k, k - 1);
                                    }
                                } else {
                                    *self.at_mut(k, k - 1) = -s * x;
                                }
                                p += s;
                                x = p / s;
                                y = q / s;
                                z = r / s;
                                q /= p;
                                r /= p;
                                for j in k..=nn {
                                    p = self.at(k, j) + q * self.at(k + 1, j);
                                    if k != nn - 1 {
                                        p += r * self.at(k + 2, j);
                                        *self.at_mut(k + 2, j) -= p * z;
                                    }
                                    *self.at_mut(k + 1, j) -= p * y;
                                    *self.at_mut(k, j) -= p * x;
                                }
                                let mmin = if nn < k + 3 { nn } else { k + 3 };
                                for i in l..=mmin {
                                    p = x * self.at(i, k) + y * self.at(i, k + 1);
                                    if k != nn - 1 {
                                        p += z * self.at(i, k + 2);
                                        *self.at_mut(i, k + 2) -= p * r;
                                    }
                                    *self.at_mut(i, k + 1) -= p * q;
                                    *self.at_mut(i, k) -= p;
                                }
                            }
                            k += 1;
                        }
                    }
                }
                if nn < 2 || l + 1 >= nn {
                    break;
                }
            }
        }
        Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
    }
}

/// Eigenvalues of the `n × n` row-major matrix `entries`, sorted by
/// descending real part, then descending imaginary part.
pub fn eigenvalues(entries: &[f64], n: usize) -> Result<Spectrum, EigenError> {
    if entries.len() != n * n {
        return Err(EigenError::Shape {
            len: entries.len(),
            n,
        });
    }
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            balanced_norm: 0.0,
        });
    }
    let mut work = Work::from_row_major(entries, n);
    work.balance();
    let balanced_norm = work.norm();
    work.hessenberg();
    let mut values = work.qr()?;
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(Spectrum {
        values,
        balanced_norm,
    })
}
