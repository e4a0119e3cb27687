//! Real cubic polynomials and their real roots.
//!
//! Roots come from the eigenvalues of the companion matrix of a rescaled,
//! monic copy of the polynomial, followed by a Newton polish on the
//! original coefficients. Near a fold (a double root) the eigenvalue route
//! stays well defined where discriminant-based branch selection does not.

use alloc::vec::Vec;

use crate::eigen::{self, EigenError};
use crate::math;

/// `c3·x³ + c2·x² + c1·x + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

/// Imaginary parts below `REAL_ROOT_REL·|Re| + REAL_ROOT_ABS` count as real.
pub const REAL_ROOT_REL: f64 = 1e-8;
pub const REAL_ROOT_ABS: f64 = 1e-20;

impl Cubic {
    pub fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Cubic { c3, c2, c1, c0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }

    /// Largest magnitude among the individual terms at `x`, the scale
    /// against which a residual is judged.
    pub fn term_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        (self.c3.abs() * ax * ax * ax)
            .max(self.c2.abs() * ax * ax)
            .max(self.c1.abs() * ax)
            .max(self.c0.abs())
    }

    /// `|p(x)| / term_scale(x)`.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let scale = self.term_scale(x);
        if scale == 0.0 {
            0.0
        } else {
            self.eval(x).abs() / scale
        }
    }

    /// Discriminant `18abcd − 4b³d + b²c² − 4ac³ − 27a²d²`; positive means
    /// three distinct real roots, negative one real root and a complex pair.
    pub fn discriminant(&self) -> f64 {
        let (a, b, c, d) = (self.c3, self.c2, self.c1, self.c0);
        18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c
            - 4.0 * a * c * c * c
            - 27.0 * a * a * d * d
    }

    /// Discriminant of the polynomial after substituting `x = scale·y` and
    /// dividing by its largest coefficient; same sign as [`Self::discriminant`],
    /// but free of overflow for the wildly scaled physical coefficients.
    pub fn normalized_discriminant(&self) -> f64 {
        self.rescaled().1.discriminant()
    }

    /// Rescale `x = s·y` so the coefficients of the polynomial in `y` are
    /// of comparable size, then normalize by the largest.
    fn rescaled(&self) -> (f64, Cubic) {
        let s = if self.c3 != 0.0 && self.c0 != 0.0 {
            math::cbrt((self.c0 / self.c3).abs())
        } else if self.c3 != 0.0 && self.c1 != 0.0 {
            math::sqrt((self.c1 / self.c3).abs())
        } else {
            1.0
        };
        let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
        let scaled = Cubic {
            c3: self.c3 * s * s * s,
            c2: self.c2 * s * s,
            c1: self.c1 * s,
            c0: self.c0,
        };
        let norm = scaled
            .c3
            .abs()
            .max(scaled.c2.abs())
            .max(scaled.c1.abs())
            .max(scaled.c0.abs());
        let norm = if norm > 0.0 { norm } else { 1.0 };
        (
            s,
            Cubic {
                c3: scaled.c3 / norm,
                c2: scaled.c2 / norm,
                c1: scaled.c1 / norm,
                c0: scaled.c0 / norm,
            },
        )
    }

    /// All real roots, ascending. Handles degenerate leading coefficients
    /// by dropping to the quadratic or linear case.
    pub fn real_roots(&self) -> Result<Vec<f64>, EigenError> {
        let (s, y) = self.rescaled();
        let mut roots = Vec::new();
        if y.c3.abs() > 1e-14 {
            let companion = [
                -y.c2 / y.c3,
                -y.c1 / y.c3,
                -y.c0 / y.c3,
                1.0,
                0.0,
                0.0,
                0.0,
                1.0,
                0.0,
            ];
            let spectrum = eigen::eigenvalues(&companion, 3)?;
            for z in spectrum.values {
                if z.im.abs() < REAL_ROOT_REL * z.re.abs() + REAL_ROOT_ABS {
                    roots.push(z.re * s);
                }
            }
        } else if y.c2.abs() > 1e-14 {
            let disc = y.c1 * y.c1 - 4.0 * y.c2 * y.c0;
            if disc >= 0.0 {
                let q = -0.5 * (y.c1 + math::sqrt(disc).copysign(y.c1));
                roots.push(q / y.c2 * s);
                if q != 0.0 {
                    roots.push(y.c0 / q * s);
                }
            }
        } else if y.c1 != 0.0 {
            roots.push(-y.c0 / y.c1 * s);
        }
        for root in roots.iter_mut() {
            *root = self.polish(*root);
        }
        roots.sort_by(f64::total_cmp);
        Ok(roots)
    }

    /// Newton iterations from `x`, kept only while they reduce the residual.
    pub fn polish(&self, mut x: f64) -> f64 {
        let mut best = self.eval(x).abs();
        for _ in 0..50 {
            let d = self.derivative(x);
            if d == 0.0 || best == 0.0 {
                break;
            }
            let next = x - self.eval(x) / d;
            let value = self.eval(next).abs();
            if !next.is_finite() || value >= best {
                break;
            }
            x = next;
            best = value;
        }
        x
    }
}
