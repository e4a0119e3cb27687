//! Linearization around detuned steady states: the 6×6 Jacobian, the
//! mechanical susceptibility, the two Routh–Hurwitz conditions and an
//! eigenvalue verdict used as the reference.
//!
//! State ordering is `(Re a₁, Im a₁, Re a₂, Im a₂, x, ẋ)` in SI units.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::eigen::{self, EigenError};
use crate::error::ModelError;
use crate::math::HBAR;
use crate::model::{derive_rates, SystemParams};
use crate::steady_state::{
    solve_detuned_photon_number, steady_state_from_photon_number, Branch, PolynomialForm,
    SteadyState,
};

/// Relative margin for the eigenvalue verdict: stable iff
/// `max Re λ < −EIGEN_MARGIN·‖balanced Jacobian‖`.
pub const EIGEN_MARGIN: f64 = 1e-12;

pub type Jacobian = [f64; 36];

/// Steady states of the detuned system, ascending in photon number. The
/// roots are taken from the self-consistent form of the power polynomial
/// so that every returned state is an exact fixed point of the dynamics.
pub fn detuned_steady_state(params: &SystemParams) -> Result<Vec<SteadyState>, ModelError> {
    detuned_steady_states_with(params, PolynomialForm::SelfConsistent)
}

/// As [`detuned_steady_state`] with an explicit polynomial form. With
/// [`PolynomialForm::AsPrinted`] the states are back-substituted from the
/// printed polynomial and need not be exact equilibria.
pub fn detuned_steady_states_with(
    params: &SystemParams,
    form: PolynomialForm,
) -> Result<Vec<SteadyState>, ModelError> {
    let rates = derive_rates(params)?;
    let undriven = params.input_power == 0.0 || rates.input_coupling == 0.0;
    if undriven || rates.tunneling == 0.0 {
        let state = steady_state_from_photon_number(params, 0.0, Branch::Unique)?;
        return Ok(alloc::vec![state]);
    }
    let roots = solve_detuned_photon_number(params, form)?;
    let tags = Branch::tags(roots.len());
    roots
        .iter()
        .zip(tags)
        .map(|(n, b)| steady_state_from_photon_number(params, *n, *b))
        .collect()
}

/// Jacobian of the mean-field vector field at `ss`.
pub fn build_jacobian(params: &SystemParams, ss: &SteadyState) -> Result<Jacobian, ModelError> {
    let r = derive_rates(params)?;
    let (k, gm, j, g) = (r.kappa, r.gamma, r.tunneling, r.com_coupling);
    let d1 = r.detuning_1;
    let de = r.detuning_2 - g * ss.x_s;
    let (re2, im2) = (ss.a2.re, ss.a2.im);
    let force = 2.0 * HBAR * g / r.mech_mass;
    let w2 = r.mech_freq * r.mech_freq;
    #[rustfmt::skip]
    let jac = [
        k,    d1,  0.0,         -j,          0.0,       0.0,
        -d1,  k,   j,           0.0,         0.0,       0.0,
        0.0,  -j,  -gm,         de,          -g * im2,  0.0,
        j,    0.0, -de,         -gm,         g * re2,   0.0,
        0.0,  0.0, 0.0,         0.0,         0.0,       1.0,
        0.0,  0.0, force * re2, force * im2, -w2,       -r.mech_damping,
    ];
    Ok(jac)
}

/// `χ[ω]` with `χ⁻¹ = m(ω_m² − ω² − iωΓ_m) + 2ħg²|a₂|²·Re Y[ω]` and
/// `Y⁻¹ = −ω − iγ + g x_s + J²/(ω − iκ)`.
pub fn susceptibility(
    params: &SystemParams,
    ss: &SteadyState,
    omega: f64,
) -> Result<Complex64, ModelError> {
    let r = derive_rates(params)?;
    let i = Complex64::i();
    let y_inv = Complex64::new(-omega + r.com_coupling * ss.x_s, -r.gamma)
        + r.tunneling * r.tunneling / Complex64::new(omega, -r.kappa);
    let spring = 2.0 * HBAR * r.com_coupling * r.com_coupling * ss.a2.norm_sqr() * y_inv.inv().re;
    let inv = r.mech_mass
        * (r.mech_freq * r.mech_freq - omega * omega - i * omega * r.mech_damping)
        + spring;
    Ok(inv.inv())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthHurwitz {
    pub s1: f64,
    pub s2: f64,
    pub stable: bool,
}

/// S₁ and S₂ with `G = g x₀ |a₂,s|`.
pub fn routh_hurwitz(params: &SystemParams, ss: &SteadyState) -> Result<RouthHurwitz, ModelError> {
    let r = derive_rates(params)?;
    let gain = r.vacuum_coupling() * ss.a2.norm();
    Ok(routh_hurwitz_terms(
        r.mech_freq,
        r.mech_damping,
        r.gamma,
        r.detuning_2,
        gain,
    ))
}

pub fn routh_hurwitz_terms(
    mech_freq: f64,
    mech_damping: f64,
    gamma: f64,
    detuning_2: f64,
    gain: f64,
) -> RouthHurwitz {
    let (wm, gmm, d2) = (mech_freq, mech_damping, detuning_2);
    let g2 = gain * gain;
    let s1 = (wm * wm + gmm * gmm / 4.0) * (d2 * d2 + gamma * gamma / 4.0) - 4.0 * wm * g2 * d2;
    let sum = gamma + gmm;
    let sum2 = sum * sum;
    let diff = d2 * d2 - wm * wm;
    let s2 = gamma * gmm * (diff * diff + 0.5 * (d2 * d2 + wm * wm) * sum2 + sum2 * sum2 / 16.0)
        + 4.0 * g2 * d2 * wm * sum2;
    RouthHurwitz {
        s1,
        s2,
        stable: s1 > 0.0 && s2 > 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenVerdict {
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub balanced_norm: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("eigenvalue computation failed: {0}")]
    Eigen(#[from] EigenError),
}

pub fn eigen_stability(
    params: &SystemParams,
    ss: &SteadyState,
) -> Result<EigenVerdict, StabilityError> {
    let jac = build_jacobian(params, ss)?;
    let spectrum = eigen::eigenvalues(&jac, 6)?;
    let max_real_part = spectrum.max_real_part();
    Ok(EigenVerdict {
        stable: max_real_part < -EIGEN_MARGIN * spectrum.balanced_norm,
        max_real_part,
        balanced_norm: spectrum.balanced_norm,
        eigenvalues: spectrum.values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub s1: f64,
    pub s2: f64,
    pub rh_stable: bool,
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub eig_stable: bool,
    pub root_count: usize,
    pub state: SteadyState,
}

impl StabilityReport {
    pub fn agrees(&self) -> bool {
        self.rh_stable == self.eig_stable
    }
}

pub fn stability_report(
    params: &SystemParams,
    ss: &SteadyState,
    root_count: usize,
) -> Result<StabilityReport, StabilityError> {
    let rh = routh_hurwitz(params, ss)?;
    let eig = eigen_stability(params, ss)?;
    Ok(StabilityReport {
        s1: rh.s1,
        s2: rh.s2,
        rh_stable: rh.stable,
        eigenvalues: eig.eigenvalues,
        max_real_part: eig.max_real_part,
        eig_stable: eig.stable,
        root_count,
        state: *ss,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapPoint {
    pub gain_loss_ratio: f64,
    pub input_power: f64,
    pub root_count: usize,
    /// One report per coexisting steady state, ascending in photon number.
    pub branches: Vec<StabilityReport>,
}

/// Every branch at one `(δ, P_in)` point.
pub fn stability_point(
    params: &SystemParams,
    gain_loss_ratio: f64,
    input_power: f64,
    form: PolynomialForm,
) -> Result<MapPoint, StabilityError> {
    let p = params
        .with_gain_loss_ratio(gain_loss_ratio)
        .with_input_power(input_power);
    let states = detuned_steady_states_with(&p, form)?;
    let root_count = states.len();
    let branches = states
        .iter()
        .map(|s| stability_report(&p, s, root_count))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MapPoint {
        gain_loss_ratio,
        input_power,
        root_count,
        branches,
    })
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<(), ModelError> {
    let ascending = grid.windows(2).all(|w| w[0] < w[1]);
    if grid.is_empty() || !ascending || grid.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name,
            value: grid.first().copied().unwrap_or(f64::NAN),
            reason: "grid must be non-empty, finite and strictly ascending",
        });
    }
    Ok(())
}

/// Row-major map: outer loop over δ, inner loop over P_in.
pub fn stability_map(
    params: &SystemParams,
    delta_grid: &[f64],
    power_grid: &[f64],
    form: PolynomialForm,
) -> Result<Vec<MapPoint>, StabilityError> {
    validate_map_grids(delta_grid, power_grid)?;
    let mut out = Vec::with_capacity(delta_grid.len() * power_grid.len());
    for &delta in delta_grid {
        for &power in power_grid {
            out.push(stability_point(params, delta, power, form)?);
        }
    }
    Ok(out)
}

pub fn validate_map_grids(delta_grid: &[f64], power_grid: &[f64]) -> Result<(), ModelError> {
    check_grid("delta_grid", delta_grid)?;
    check_grid("power_grid", power_grid)
}

/// Fraction of branch reports on which the two verdicts agree.
pub fn agreement_rate(points: &[MapPoint]) -> f64 {
    let (mut agree, mut total) = (0usize, 0usize);
    for report in points.iter().flat_map(|p| p.branches.iter()) {
        total += 1;
        if report.agrees() {
            agree += 1;
        }
    }
    if total == 0 {
        1.0
    } else {
        agree as f64 / total as f64
    }
}
