#![allow(dead_code)]

use ptphonon_core::poly::Cubic;

/// Real roots by Cardano's formula (one real root) or the trigonometric
/// form (three real roots), after substituting `x = s·y` to tame scales.
pub fn cardano_roots(p: &Cubic) -> Vec<f64> {
    let s = if p.c0 != 0.0 {
        (p.c0 / p.c3).abs().cbrt()
    } else {
        1.0
    };
    let a = p.c2 * s * s / (p.c3 * s * s * s);
    let b = p.c1 * s / (p.c3 * s * s * s);
    let c = p.c0 / (p.c3 * s * s * s);
    // y³ + a y² + b y + c; y = t − a/3
    let q = (3.0 * b - a * a) / 9.0;
    let r = (9.0 * a * b - 27.0 * c - 2.0 * a * a * a) / 54.0;
    let disc = q * q * q + r * r;
    let shift = -a / 3.0;
    let mut roots = if disc > 0.0 {
        let sq = disc.sqrt();
        vec![shift + (r + sq).cbrt() + (r - sq).cbrt()]
    } else {
        let theta = (r / (-q * q * q).sqrt()).clamp(-1.0, 1.0).acos();
        let m = 2.0 * (-q).sqrt();
        (0..3)
            .map(|k| shift + m * ((theta + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos())
            .collect()
    };
    for y in roots.iter_mut() {
        *y *= s;
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Dense sign-change scan over `[lo, hi]` with `samples` points, each
/// bracket refined by bisection.
pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / (samples - 1) as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        roots.push(lo);
    }
    for i in 1..samples {
        let x = lo + step * i as f64;
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0) {
            let (mut a, mut b, mut fa) = (x_prev, x, f_prev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                let fm = f(m);
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
