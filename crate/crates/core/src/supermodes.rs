//! Supermodes of the coupled resonators, mechanical gain supplied by the
//! transition between them, and the resulting phonon-laser threshold.
//!
//! Linewidths follow the sign of the mode equations: `γ_± > 0` is net gain,
//! `γ_± < 0` net loss. The linewidth entering the gain Lorentzian is
//! `L = |γ₊ + γ₋| = |κ − γ|`, which equals `2γ` for two lossy resonators.

use num_complex::Complex64;

use crate::error::ModelError;
use crate::math::{self, HBAR};
use crate::model::{derive_rates, DerivedRates, SystemParams};

/// Relative tolerance for tagging the exceptional point.
pub const EXCEPTIONAL_POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Unbroken,
    Broken,
    ExceptionalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupermodeSpectrum {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Δω = ω₊ − ω₋.
    pub splitting: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupermodePopulations {
    pub n_plus: f64,
    pub n_minus: f64,
    pub delta_n: f64,
}

impl SupermodePopulations {
    pub fn new(n_plus: f64, n_minus: f64) -> Self {
        SupermodePopulations {
            n_plus,
            n_minus,
            delta_n: n_plus - n_minus,
        }
    }
}

/// Compares `J` with `|κ + γ|/2`.
pub fn classify_regime(kappa: f64, gamma: f64, tunneling: f64) -> Regime {
    let half_sum = 0.5 * (kappa + gamma).abs();
    let j = tunneling.abs();
    if (j - half_sum).abs() <= EXCEPTIONAL_POINT_TOL * j.max(half_sum) {
        Regime::ExceptionalPoint
    } else if j > half_sum {
        Regime::Unbroken
    } else {
        Regime::Broken
    }
}

pub fn spectrum_from_rates(
    omega_c: f64,
    kappa: f64,
    gamma: f64,
    tunneling: f64,
) -> SupermodeSpectrum {
    let regime = classify_regime(kappa, gamma, tunneling);
    let half_sum = 0.5 * (kappa + gamma);
    let mean_rate = 0.5 * (kappa - gamma);
    let radicand = tunneling * tunneling - half_sum * half_sum;
    match regime {
        Regime::Unbroken | Regime::ExceptionalPoint => {
            let half_split = math::sqrt(radicand.max(0.0));
            SupermodeSpectrum {
                omega_plus: omega_c + half_split,
                omega_minus: omega_c - half_split,
                gamma_plus: mean_rate,
                gamma_minus: mean_rate,
                splitting: 2.0 * half_split,
                regime,
            }
        }
        Regime::Broken => {
            let half_gap = math::sqrt(-radicand);
            SupermodeSpectrum {
                omega_plus: omega_c,
                omega_minus: omega_c,
                gamma_plus: mean_rate + half_gap,
                gamma_minus: mean_rate - half_gap,
                splitting: 0.0,
                regime,
            }
        }
    }
}

pub fn supermode_spectrum(params: &SystemParams) -> Result<SupermodeSpectrum, ModelError> {
    let r = derive_rates(params)?;
    Ok(spectrum_from_rates(
        r.omega_c,
        r.kappa,
        r.gamma,
        r.tunneling,
    ))
}

/// `C[ω] = [κ − γ + i(ω − Δω)]⁻¹`.
pub fn cavity_factor(params: &SystemParams, omega: f64) -> Result<Complex64, ModelError> {
    let r = derive_rates(params)?;
    let s = spectrum_from_rates(r.omega_c, r.kappa, r.gamma, r.tunneling);
    let den = Complex64::new(r.kappa - r.gamma, omega - s.splitting);
    if den.re == 0.0 && den.im == 0.0 {
        return Err(ModelError::ResonantDivergence);
    }
    Ok(den.inv())
}

fn linewidth(s: &SupermodeSpectrum) -> f64 {
    (s.gamma_plus + s.gamma_minus).abs()
}

fn lasing_spectrum(params: &SystemParams) -> Result<(DerivedRates, SupermodeSpectrum), ModelError> {
    let r = derive_rates(params)?;
    let s = spectrum_from_rates(r.omega_c, r.kappa, r.gamma, r.tunneling);
    if s.regime == Regime::Broken {
        return Err(ModelError::NoLasing);
    }
    Ok((r, s))
}

/// `G = (gx₀/2)²·n₊·L/[(Δω − ω_m)² + L²]` with `L = |κ − γ|`. Returns
/// `+∞` when `L = 0` at `Δω = ω_m` with a nonzero population.
pub fn mechanical_gain(
    params: &SystemParams,
    populations: &SupermodePopulations,
) -> Result<f64, ModelError> {
    if !(populations.n_plus >= 0.0) {
        return Err(ModelError::NegativePhotonNumber(populations.n_plus));
    }
    let (r, s) = lasing_spectrum(params)?;
    let l = linewidth(&s);
    let mismatch = s.splitting - r.mech_freq;
    let den = mismatch * mismatch + l * l;
    if populations.n_plus == 0.0 {
        return Ok(0.0);
    }
    if den == 0.0 {
        return Ok(f64::INFINITY);
    }
    let half = 0.5 * r.vacuum_coupling();
    Ok(half * half * populations.n_plus * l / den)
}

/// `n₊ = P_in/(ħ·L·ω₊)`, `n₋ = 0`.
pub fn pump_density(params: &SystemParams) -> Result<SupermodePopulations, ModelError> {
    let r = derive_rates(params)?;
    let s = spectrum_from_rates(r.omega_c, r.kappa, r.gamma, r.tunneling);
    let l = linewidth(&s);
    if l == 0.0 {
        return Err(ModelError::DivergentPopulation);
    }
    Ok(SupermodePopulations::new(
        params.input_power / (HBAR * l * s.omega_plus),
        0.0,
    ))
}

/// Gain at the configured input power, `mechanical_gain ∘ pump_density`
/// in the simplified form `(gx₀/2)²P_in/(ħω₊)/[(Δω − ω_m)² + L²]`, which stays
/// finite off resonance when `L = 0`.
pub fn gain_at_power(params: &SystemParams) -> Result<f64, ModelError> {
    let (r, s) = lasing_spectrum(params)?;
    let l = linewidth(&s);
    let mismatch = s.splitting - r.mech_freq;
    let den = mismatch * mismatch + l * l;
    if params.input_power == 0.0 {
        return Ok(0.0);
    }
    if den == 0.0 {
        return Ok(f64::INFINITY);
    }
    let half = 0.5 * r.vacuum_coupling();
    Ok(half * half * params.input_power / (HBAR * s.omega_plus) / den)
}

/// `P_th = 4ħΓ_mω₊[(Δω − ω_m)² + L²]/(gx₀)²`, solving `G(P_th) = Γ_m`.
pub fn threshold_power(params: &SystemParams) -> Result<f64, ModelError> {
    let (r, s) = lasing_spectrum(params)?;
    let l = linewidth(&s);
    let mismatch = s.splitting - r.mech_freq;
    let gx0 = r.vacuum_coupling();
    Ok(4.0 * HBAR * r.mech_damping * s.omega_plus * (mismatch * mismatch + l * l) / (gx0 * gx0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononNumber {
    /// Stimulated phonon number per mechanical lifetime.
    pub value: f64,
    /// Set when the gain diverges and `value` is `+∞`.
    pub saturated: bool,
}

/// `n = exp[2(G − Γ_m)/Γ_m]` at the line centre.
pub fn phonon_number(params: &SystemParams) -> Result<PhononNumber, ModelError> {
    let gain = gain_at_power(params)?;
    phonon_number_from_gain(gain, params.mech_damping)
}

pub fn phonon_number_from_gain(gain: f64, damping: f64) -> Result<PhononNumber, ModelError> {
    if !(damping > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "mech_damping",
            value: damping,
            reason: "phonon number needs Γ_m > 0",
        });
    }
    if gain.is_infinite() {
        return Ok(PhononNumber {
            value: f64::INFINITY,
            saturated: true,
        });
    }
    Ok(PhononNumber {
        value: math::exp(2.0 * (gain - damping) / damping),
        saturated: false,
    })
}
