//! Dimension tags (length, mass, time exponents) for auditing the unit
//! balance of the model's formulas.
//!
//! Photon numbers and field amplitudes in √photons are dimensionless. The
//! audit evaluates each formula symbolically on these tags; a formula passes
//! when its two sides carry the same tag.

use core::ops::{Div, Mul};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dim {
    pub length: i8,
    pub mass: i8,
    pub time: i8,
}

impl Dim {
    pub const NONE: Dim = Dim::new(0, 0, 0);
    pub const LENGTH: Dim = Dim::new(1, 0, 0);
    pub const MASS: Dim = Dim::new(0, 1, 0);
    pub const TIME: Dim = Dim::new(0, 0, 1);
    pub const RATE: Dim = Dim::new(0, 0, -1);
    /// J s
    pub const ACTION: Dim = Dim::new(2, 1, -1);
    /// W
    pub const POWER: Dim = Dim::new(2, 1, -3);
    /// N
    pub const FORCE: Dim = Dim::new(1, 1, -2);

    pub const fn new(length: i8, mass: i8, time: i8) -> Self {
        Dim { length, mass, time }
    }

    pub const fn pow(self, n: i8) -> Self {
        Dim::new(self.length * n, self.mass * n, self.time * n)
    }
}

impl Mul for Dim {
    type Output = Dim;
    fn mul(self, rhs: Dim) -> Dim {
        Dim::new(
            self.length + rhs.length,
            self.mass + rhs.mass,
            self.time + rhs.time,
        )
    }
}

impl Div for Dim {
    type Output = Dim;
    fn div(self, rhs: Dim) -> Dim {
        Dim::new(
            self.length - rhs.length,
            self.mass - rhs.mass,
            self.time - rhs.time,
        )
    }
}

/// One audited formula: its name and the dimensions of both sides.
#[derive(Debug, Clone, Copy)]
pub struct AuditEntry {
    pub formula: &'static str,
    pub lhs: Dim,
    pub rhs: Dim,
}

impl AuditEntry {
    pub fn balanced(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Dimensional audit of every formula the crate evaluates.
pub fn audit() -> [AuditEntry; 14] {
    use Dim as D;
    let rate = D::RATE;
    let omega = D::RATE;
    let g = D::RATE / D::LENGTH;
    let hbar = D::ACTION;
    let m = D::MASS;
    let x = D::LENGTH;
    let power = D::POWER;
    let n = D::NONE;
    let amp = D::NONE;
    [
        AuditEntry {
            formula: "g x0 is a rate",
            lhs: g * x,
            rhs: rate,
        },
        AuditEntry {
            formula: "x0 = sqrt(hbar/(2 m w_m))",
            lhs: x.pow(2),
            rhs: hbar / (m * omega),
        },
        AuditEntry {
            formula: "photon flux = P/(hbar w_c)",
            lhs: rate,
            rhs: power / (hbar * omega),
        },
        AuditEntry {
            formula: "radiation force hbar g |a2|^2 = m w_m^2 x",
            lhs: hbar * g * amp,
            rhs: m * omega.pow(2) * x,
        },
        AuditEntry {
            formula: "force balance 2 eta J^2 P / R = m w^2 x [(kg - J^2)^2 + (k g x)^2]",
            lhs: rate.pow(3) * power / D::LENGTH,
            rhs: m * omega.pow(2) * x * rate.pow(4),
        },
        AuditEntry {
            formula: "closed form x^3 = 2 P R/(m w_m^2 w_c Q_c)",
            lhs: x.pow(3),
            rhs: power * D::LENGTH / (m * omega.pow(3)),
        },
        AuditEntry {
            formula: "passive x = P/(2 gamma m w_m^2 R)",
            lhs: x,
            rhs: power / (rate * m * omega.pow(2) * D::LENGTH),
        },
        AuditEntry {
            formula: "eta argument 4 gamma^2 m w_m^2 R^2/(w_c P) is dimensionless",
            lhs: rate.pow(2) * m * omega.pow(2) * D::LENGTH.pow(2) / (omega * power),
            rhs: D::NONE,
        },
        AuditEntry {
            formula: "polynomial P = hbar w_c N [c1 + c2 N + c3 N^2]/(2 eta J^2)",
            lhs: power,
            rhs: hbar * omega * n * rate.pow(4) / rate.pow(3),
        },
        AuditEntry {
            formula: "photon shift hbar g^2/(m w_m^2) per photon is a rate",
            lhs: hbar * g.pow(2) / (m * omega.pow(2)),
            rhs: rate,
        },
        AuditEntry {
            formula: "gain G = (g x0/2)^2 n (k-g)/((dw-w_m)^2 + (k-g)^2)",
            lhs: rate,
            rhs: (g * x).pow(2) * n * rate / rate.pow(2),
        },
        AuditEntry {
            formula: "threshold P = 4 hbar Gamma w [(dw-w)^2+(k-g)^2]/(g x0)^2",
            lhs: power,
            rhs: hbar * rate * omega * rate.pow(2) / (g * x).pow(2),
        },
        AuditEntry {
            formula: "inverse susceptibility m(w^2) + 2 hbar g^2 |a|^2 Re Y",
            lhs: m * omega.pow(2),
            rhs: hbar * g.pow(2) * amp * D::TIME,
        },
        AuditEntry {
            formula: "stability S1: (w^2)(D^2) = w G^2 D",
            lhs: omega.pow(2) * rate.pow(2),
            rhs: omega * rate.pow(2) * rate,
        },
    ]
}
