//! Algebraic steady states of the mean-field equations
//!
//! ```text
//! ȧ₁ = (κ − iΔ₁)a₁ + iJa₂ + √(2η)·f_in
//! ȧ₂ = (−γ − iΔ₂)a₂ + iJa₁ + iga₂x
//! ẍ + Γ_m ẋ + ω_m²x = ħg|a₂|²/m
//! ```
//!
//! where η is the input-coupling rate (η = κ for a gain-coupled port).
//! Setting the derivatives to zero gives `x_s = ħg N/(mω_m²)` with
//! `N = |a₂|²`, and a cubic for either `x_s` (zero detunings) or `N`
//! (general detunings).

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::ModelError;
use crate::math::{self, HBAR};
use crate::model::{derive_rates, DerivedRates, InputCoupling, SystemParams};
use crate::poly::Cubic;

/// Passive-system threshold power used as the reference of ξ (W).
pub const PASSIVE_THRESHOLD_REFERENCE: f64 = 7e-6;

/// Relative tolerance for the `J² = κγ` precondition of the closed form.
pub const BALANCED_COUPLING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Unique,
    Lower,
    Middle,
    Upper,
}

impl Branch {
    /// Tags for `count` roots sorted ascending.
    pub fn tags(count: usize) -> &'static [Branch] {
        match count {
            1 => &[Branch::Unique],
            2 => &[Branch::Lower, Branch::Upper],
            3 => &[Branch::Lower, Branch::Middle, Branch::Upper],
            _ => &[],
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Branch::Unique => 0,
            Branch::Lower => 1,
            Branch::Middle => 2,
            Branch::Upper => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Mechanical displacement (m).
    pub x_s: f64,
    /// Field of the active resonator (√photons).
    pub a1: Complex64,
    /// Field of the passive resonator (√photons).
    pub a2: Complex64,
    /// N = |a₂|².
    pub photon_number_passive: f64,
    pub branch: Branch,
}

impl SteadyState {
    pub fn zero() -> Self {
        SteadyState {
            x_s: 0.0,
            a1: Complex64::new(0.0, 0.0),
            a2: Complex64::new(0.0, 0.0),
            photon_number_passive: 0.0,
            branch: Branch::Unique,
        }
    }
}

/// Which coefficients to use for the detuned power polynomial `P_in(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolynomialForm {
    /// Coefficients as printed, including `−Δ₁²Δ₂` in the quadratic
    /// coefficient and the `ω_c/(2κJ²)` prefactor.
    #[default]
    AsPrinted,
    /// Coefficients obtained by eliminating `a₁`, `a₂` from the mean-field
    /// equations: the quadratic coefficient carries `−2Δ₁²Δ₂` and the
    /// prefactor uses the input-coupling rate. Its roots are exact fixed
    /// points of the dynamics.
    SelfConsistent,
}

fn drive_term(rates: &DerivedRates) -> f64 {
    math::sqrt(2.0 * rates.input_coupling) * rates.drive_amplitude()
}

fn check_drive(params: &SystemParams, rates: &DerivedRates) -> Result<(), ModelError> {
    if rates.photon_flux > 0.0 && rates.input_coupling == 0.0 {
        if let InputCoupling::GainCoupled = params.input_coupling {
            return Err(ModelError::DegenerateInputCoupling);
        }
    }
    Ok(())
}

/// Fields at a given mechanical displacement, from the two optical
/// equations with `ȧ₁ = ȧ₂ = 0`.
pub fn fields_at_displacement(rates: &DerivedRates, x: f64) -> (Complex64, Complex64) {
    let i = Complex64::i();
    let drive = drive_term(rates);
    if drive == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let j = rates.tunneling;
    let detuning_eff = rates.detuning_2 - rates.com_coupling * x;
    let active = Complex64::new(rates.kappa, -rates.detuning_1);
    let passive = Complex64::new(-rates.gamma, -detuning_eff);
    let den = passive * active + j * j;
    let a2 = i * j * drive / den;
    // ȧ₁ = 0: a₁ = −(iJa₂ + drive)/(κ − iΔ₁); ȧ₂ = 0: a₁ = −(−γ − iΔ_eff)a₂/(iJ)
    let a1 = if active.norm() >= j.abs() {
        -(i * j * a2 + drive) / active
    } else {
        -(passive * a2) / (i * j)
    };
    (a1, a2)
}

/// Cubic in `x_s` from the force balance at zero detunings:
/// `κ²g²mω_m²·x³ + (κγ − J²)²mω_m²·x − 2ηJ²P_in/R = 0`.
pub fn force_balance_cubic(params: &SystemParams) -> Result<Cubic, ModelError> {
    let rates = derive_rates(params)?;
    Ok(force_balance_cubic_from(params, &rates))
}

fn force_balance_cubic_from(params: &SystemParams, rates: &DerivedRates) -> Cubic {
    let k = rates.kappa;
    let g = rates.com_coupling;
    let j2 = rates.tunneling * rates.tunneling;
    let stiffness = rates.mech_mass * rates.mech_freq * rates.mech_freq;
    let mismatch = k * rates.gamma - j2;
    Cubic::new(
        k * k * g * g * stiffness,
        0.0,
        mismatch * mismatch * stiffness,
        -2.0 * rates.input_coupling * j2 * params.input_power / params.radius,
    )
}

fn require_zero_detuning(params: &SystemParams) -> Result<(), ModelError> {
    if params.has_detuning() {
        Err(ModelError::DetuningsPresent(
            params.detuning_1,
            params.detuning_2,
        ))
    } else {
        Ok(())
    }
}

fn state_at(rates: &DerivedRates, x: f64, branch: Branch) -> SteadyState {
    let (a1, a2) = fields_at_displacement(rates, x);
    SteadyState {
        x_s: x,
        a1,
        a2,
        photon_number_passive: a2.norm_sqr(),
        branch,
    }
}

/// All non-negative real roots of the zero-detuning force balance, ascending,
/// with the fields back-substituted.
pub fn solve_force_balance(params: &SystemParams) -> Result<Vec<SteadyState>, ModelError> {
    require_zero_detuning(params)?;
    let rates = derive_rates(params)?;
    check_drive(params, &rates)?;
    if params.input_power == 0.0 || rates.tunneling == 0.0 {
        return Ok(vec![state_at(&rates, 0.0, Branch::Unique)]);
    }
    let cubic = force_balance_cubic_from(params, &rates);
    let roots: Vec<f64> = cubic
        .real_roots()
        .map_err(|_| ModelError::InvalidParameter {
            name: "force_balance",
            value: f64::NAN,
            reason: "companion eigenvalue iteration failed",
        })?
        .into_iter()
        .filter(|x| *x >= 0.0)
        .collect();
    let tags = Branch::tags(roots.len());
    Ok(roots
        .iter()
        .zip(tags)
        .map(|(x, b)| state_at(&rates, *x, *b))
        .collect())
}

/// Closed form at `J² = κγ`: the linear term of the cubic vanishes and
/// `x_s = (2ηγP_in/(κRg²mω_m²))^{1/3}`, which for a gain-coupled port is
/// `(2P_in R/(mω_m²ω_c Q_c))^{1/3}`; `a₂ = J√(2η)f_in/(κ g x_s)`.
pub fn balanced_coupling_solution(params: &SystemParams) -> Result<SteadyState, ModelError> {
    require_zero_detuning(params)?;
    let rates = derive_rates(params)?;
    check_drive(params, &rates)?;
    let j2 = rates.tunneling * rates.tunneling;
    let kg = rates.kappa * rates.gamma;
    let mismatch = if kg == 0.0 && j2 == 0.0 {
        0.0
    } else {
        (j2 - kg).abs() / j2.abs().max(kg.abs())
    };
    if mismatch > BALANCED_COUPLING_TOL || rates.kappa <= 0.0 {
        return Err(ModelError::UnbalancedCoupling(mismatch));
    }
    if params.input_power == 0.0 {
        return Ok(SteadyState::zero());
    }
    let g = rates.com_coupling;
    let stiffness = rates.mech_mass * rates.mech_freq * rates.mech_freq;
    let x = math::cbrt(
        2.0 * rates.input_coupling * rates.gamma * params.input_power
            / (rates.kappa * params.radius * g * g * stiffness),
    );
    let a2 = Complex64::new(
        rates.tunneling * drive_term(&rates) / (rates.kappa * g * x),
        0.0,
    );
    let (a1, _) = fields_at_displacement(&rates, x);
    Ok(SteadyState {
        x_s: x,
        a1,
        a2,
        photon_number_passive: a2.norm_sqr(),
        branch: Branch::Unique,
    })
}

/// Two coupled lossy resonators at `J = γ` and `gx_s ≪ γ`:
/// `|a₁| = |a₂| = f_in/√(2γ)` and `x_{s,p} = P_in/(2γmω_m²R)`.
pub fn passive_baseline(params: &SystemParams) -> Result<SteadyState, ModelError> {
    let rates = derive_rates(params)?;
    let amplitude = rates.drive_amplitude() / math::sqrt(2.0 * rates.gamma);
    let x = params.input_power
        / (2.0 * rates.gamma * rates.mech_mass * rates.mech_freq * rates.mech_freq * params.radius);
    Ok(SteadyState {
        x_s: x,
        a1: Complex64::new(amplitude, 0.0),
        // ȧ₂ = 0 with J = γ gives a₂ = i a₁
        a2: Complex64::new(0.0, amplitude),
        photon_number_passive: amplitude * amplitude,
        branch: Branch::Unique,
    })
}

/// `|a₂|²` of the passive baseline, `f_in²/(2γ)`.
pub fn passive_photon_number(params: &SystemParams) -> Result<f64, ModelError> {
    let rates = derive_rates(params)?;
    Ok(rates.photon_flux / (2.0 * rates.gamma))
}

/// η = |a₂|²/|a₂|²_p for a given steady state.
pub fn eta_for_state(params: &SystemParams, state: &SteadyState) -> Result<f64, ModelError> {
    if params.input_power == 0.0 {
        return Err(ModelError::DivergentAmplification);
    }
    Ok(state.photon_number_passive / passive_photon_number(params)?)
}

/// Closed-form amplification `η = (4γ²mω_m²R²/(ω_c P_in))^{2/3}`, valid at
/// exact gain-loss balance with `J = γ` and a gain-coupled port.
pub fn amplification_eta_closed_form(params: &SystemParams) -> Result<f64, ModelError> {
    require_zero_detuning(params)?;
    if params.input_power == 0.0 {
        return Err(ModelError::DivergentAmplification);
    }
    let rates = derive_rates(params)?;
    let balanced = (params.gain_loss_ratio - 1.0).abs() <= 1e-12
        && (params.tunneling_rate_ratio - 1.0).abs() <= BALANCED_COUPLING_TOL
        && params.input_coupling == InputCoupling::GainCoupled;
    if !balanced {
        let j2 = rates.tunneling * rates.tunneling;
        let kg = rates.kappa * rates.gamma;
        return Err(ModelError::UnbalancedCoupling(
            (j2 - kg).abs() / j2.abs().max(kg.abs()).max(f64::MIN_POSITIVE),
        ));
    }
    let base = 4.0
        * rates.gamma
        * rates.gamma
        * rates.mech_mass
        * rates.mech_freq
        * rates.mech_freq
        * params.radius
        * params.radius
        / (rates.omega_c * params.input_power);
    Ok(math::powf(base, 2.0 / 3.0))
}

/// η from the closed form at exact balance, otherwise the numerical ratio
/// `|a₂|²/|a₂|²_p` from the zero-detuning solver.
pub fn amplification_eta(params: &SystemParams) -> Result<f64, ModelError> {
    match amplification_eta_closed_form(params) {
        Ok(eta) => Ok(eta),
        Err(ModelError::UnbalancedCoupling(_)) => {
            let states = solve_force_balance(params)?;
            eta_for_state(params, &states[0])
        }
        Err(e) => Err(e),
    }
}

/// ξ = x_s(δ, P_in) / x_{s,p}(P_ref) with `P_ref` the passive threshold
/// reference (normally [`PASSIVE_THRESHOLD_REFERENCE`]).
pub fn relative_xi(params: &SystemParams, reference_power: f64) -> Result<f64, ModelError> {
    let states = solve_force_balance(params)?;
    relative_xi_for_state(params, &states[0], reference_power)
}

pub fn relative_xi_for_state(
    params: &SystemParams,
    state: &SteadyState,
    reference_power: f64,
) -> Result<f64, ModelError> {
    if !(reference_power > 0.0 && reference_power.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "reference_power",
            value: reference_power,
            reason: "must be finite and > 0",
        });
    }
    let reference = passive_baseline(&params.with_input_power(reference_power))?;
    Ok(state.x_s / reference.x_s)
}

/// Coefficients `[c₁, c₂, c₃]` of `P_in(N) = c₁N + c₂N² + c₃N³` (W), with
/// the prefactor included and ħ restored (`g²/(mω_m²)` → `ħg²/(mω_m²)`).
pub fn detuned_power_coefficients(
    params: &SystemParams,
    form: PolynomialForm,
) -> Result<[f64; 3], ModelError> {
    let rates = derive_rates(params)?;
    let k = rates.kappa;
    let gm = rates.gamma;
    let j2 = rates.tunneling * rates.tunneling;
    let d1 = rates.detuning_1;
    let d2 = rates.detuning_2;
    let shift = rates.photon_shift();
    let port = match form {
        PolynomialForm::AsPrinted => k,
        PolynomialForm::SelfConsistent => rates.input_coupling,
    };
    if port == 0.0 || j2 == 0.0 {
        return Err(ModelError::SingularPolynomial {
            kappa: k,
            tunneling: rates.tunneling,
        });
    }
    let prefactor = HBAR * rates.omega_c / (2.0 * port * j2);
    let c3 = shift * shift * (d1 * d1 + k * k);
    let (c2, c1) = match form {
        PolynomialForm::AsPrinted => {
            let mismatch = gm * k - j2;
            let c2 = 2.0 * gm * d1 * k + 2.0 * j2 * d1
                - d1 * d1 * d2
                - 2.0 * gm * k * d1
                - 2.0 * k * k * d2;
            let c1 = mismatch * mismatch + d1 * d1 * d2 * d2 + 2.0 * gm * k * d1 * d2
                - 2.0 * j2 * d1 * d2
                + gm * gm * d1 * d1
                + k * k * d2 * d2
                - 2.0 * gm * d1 * k * d2;
            (c2, c1)
        }
        PolynomialForm::SelfConsistent => {
            let re = j2 - gm * k - d1 * d2;
            let im = gm * d1 - k * d2;
            (
                2.0 * (j2 * d1 - d1 * d1 * d2 - k * k * d2),
                re * re + im * im,
            )
        }
    };
    Ok([prefactor * c1, prefactor * shift * c2, prefactor * c3])
}

/// Input power that sustains `n` photons in the passive resonator.
pub fn detuned_power_polynomial(
    params: &SystemParams,
    n: f64,
    form: PolynomialForm,
) -> Result<f64, ModelError> {
    if !(n >= 0.0) {
        return Err(ModelError::NegativePhotonNumber(n));
    }
    let [c1, c2, c3] = detuned_power_coefficients(params, form)?;
    Ok(((c3 * n + c2) * n + c1) * n)
}

/// `P_in(N) − P_in` as a cubic in N.
pub fn detuned_cubic(params: &SystemParams, form: PolynomialForm) -> Result<Cubic, ModelError> {
    let [c1, c2, c3] = detuned_power_coefficients(params, form)?;
    Ok(Cubic::new(c3, c2, c1, -params.input_power))
}

/// All non-negative roots N of `P_in(N) = P_in`, ascending.
pub fn solve_detuned_photon_number(
    params: &SystemParams,
    form: PolynomialForm,
) -> Result<Vec<f64>, ModelError> {
    params.validate()?;
    if params.input_power == 0.0 {
        return Ok(vec![0.0]);
    }
    let cubic = detuned_cubic(params, form)?;
    let roots = cubic
        .real_roots()
        .map_err(|_| ModelError::InvalidParameter {
            name: "detuned_polynomial",
            value: f64::NAN,
            reason: "companion eigenvalue iteration failed",
        })?;
    Ok(roots.into_iter().filter(|n| *n >= 0.0).collect())
}

/// Steady state obtained by back-substituting a photon number through
/// `x_s = ħgN/(mω_m²)` and the two optical equations.
pub fn steady_state_from_photon_number(
    params: &SystemParams,
    n: f64,
    branch: Branch,
) -> Result<SteadyState, ModelError> {
    let rates = derive_rates(params)?;
    let x = rates.photon_shift() * n / rates.com_coupling;
    Ok(state_at(&rates, x, branch))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params() -> SystemParams {
        SystemParams::reference()
    }

    #[test]
    fn undriven_system_sits_at_origin() {
        let states = solve_force_balance(&reference_params().with_input_power(0.0)).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].x_s, 0.0);
        assert_eq!(states[0].a2.norm(), 0.0);
    }

    #[test]
    fn decoupled_cavities_never_pump_the_passive_one() {
        let states = solve_force_balance(
            &reference_params()
                .with_tunneling_ratio(0.0)
                .with_input_power(5e-6),
        )
        .unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].x_s, 0.0);
        assert_eq!(states[0].a2.norm(), 0.0);
    }

    #[test]
    fn zero_gain_in_gain_coupled_mode_is_degenerate() {
        let p = reference_params().with_gain_loss_ratio(0.0);
        assert_eq!(
            solve_force_balance(&p),
            Err(ModelError::DegenerateInputCoupling)
        );
    }

    #[test]
    fn detuned_params_are_rejected_by_zero_detuning_solver() {
        let p = reference_params().with_detunings(1e6, 0.0);
        assert!(matches!(
            solve_force_balance(&p),
            Err(ModelError::DetuningsPresent(..))
        ));
    }

    #[test]
    fn closed_form_matches_general_solver() {
        for power in [1e-9, 1e-6, 7e-6, 3e-5, 1e-3] {
            let p = reference_params().with_input_power(power);
            let closed = balanced_coupling_solution(&p).unwrap();
            let general = solve_force_balance(&p).unwrap();
            assert_eq!(general.len(), 1);
            assert!((closed.x_s / general[0].x_s - 1.0).abs() < 1e-9);
            assert!(
                (closed.photon_number_passive / general[0].photon_number_passive - 1.0).abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn closed_form_cube_root_law() {
        let x1 = balanced_coupling_solution(&reference_params().with_input_power(1e-6))
            .unwrap()
            .x_s;
        let x8 = balanced_coupling_solution(&reference_params().with_input_power(8e-6))
            .unwrap()
            .x_s;
        assert!((x8 / x1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_regression_value() {
        // (2·1e-6·34.5e-6 / (5e-11·(2π·23.4e6)²·(c/1550e-9)·3e7))^{1/3},
        // evaluated separately in 30-digit arithmetic.
        let x = balanced_coupling_solution(&reference_params()).unwrap().x_s;
        assert!((x / 2.224_124_658_762_204e-13 - 1.0).abs() < 1e-12, "{x:e}");
    }

    #[test]
    fn closed_form_rejects_unbalanced_coupling() {
        let p = reference_params().with_tunneling_ratio(1.3);
        assert!(matches!(
            balanced_coupling_solution(&p),
            Err(ModelError::UnbalancedCoupling(_))
        ));
    }

    #[test]
    fn passive_baseline_is_linear() {
        let x1 = passive_baseline(&reference_params().with_input_power(3e-6))
            .unwrap()
            .x_s;
        let x2 = passive_baseline(&reference_params().with_input_power(6e-6))
            .unwrap()
            .x_s;
        assert_eq!(x2, 2.0 * x1);
    }

    #[test]
    fn passive_baseline_regression_value() {
        // 7e-6 / (2γ·5e-11·(2π·23.4e6)²·34.5e-6) with γ = (c/1550e-9)/3e7,
        // evaluated separately in 30-digit arithmetic.
        let x = passive_baseline(&reference_params().with_input_power(7e-6))
            .unwrap()
            .x_s;
        assert!(
            (x / 1.455_860_434_055_171_6e-14 - 1.0).abs() < 1e-12,
            "{x:e}"
        );
    }

    #[test]
    fn general_solver_reproduces_passive_baseline() {
        let p = reference_params()
            .with_input_power(7e-6)
            .passive_counterpart();
        let general = solve_force_balance(&p).unwrap();
        let baseline = passive_baseline(&p).unwrap();
        assert!((general[0].x_s / baseline.x_s - 1.0).abs() < 0.01);
        assert!((general[0].a1.norm() / baseline.a1.norm() - 1.0).abs() < 0.01);
    }

    #[test]
    fn eta_power_law_and_divergence() {
        let e1 = amplification_eta(&reference_params().with_input_power(1e-6)).unwrap();
        let e7 = amplification_eta(&reference_params().with_input_power(7e-6)).unwrap();
        assert!((e1 / e7 - math::powf(7.0, 2.0 / 3.0)).abs() < 1e-12 * e1 / e7);
        assert_eq!(
            amplification_eta(&reference_params().with_input_power(0.0)),
            Err(ModelError::DivergentAmplification)
        );
    }

    #[test]
    fn eta_numeric_path_agrees_with_closed_form_at_balance() {
        let p = reference_params().with_input_power(2e-6);
        let states = solve_force_balance(&p).unwrap();
        let numeric = eta_for_state(&p, &states[0]).unwrap();
        let closed = amplification_eta_closed_form(&p).unwrap();
        assert!((numeric / closed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn xi_identity() {
        for power in [1e-7, 1e-6, 7e-6, 2e-5] {
            let p = reference_params().with_input_power(power);
            let xi = relative_xi(&p, PASSIVE_THRESHOLD_REFERENCE).unwrap();
            let eta = amplification_eta(&p).unwrap();
            assert!((xi / (eta * power / PASSIVE_THRESHOLD_REFERENCE) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn polynomial_vanishes_at_zero_photons() {
        let p = reference_params().with_detunings(1e6, 2e7);
        for form in [PolynomialForm::AsPrinted, PolynomialForm::SelfConsistent] {
            assert_eq!(detuned_power_polynomial(&p, 0.0, form).unwrap(), 0.0);
        }
        assert!(matches!(
            detuned_power_polynomial(&p, -1.0, PolynomialForm::AsPrinted),
            Err(ModelError::NegativePhotonNumber(_))
        ));
    }

    #[test]
    fn polynomial_linear_coefficient_collapses_without_detuning() {
        let p = reference_params()
            .with_gain_loss_ratio(1.3)
            .with_tunneling_ratio(0.8);
        let rates = derive_rates(&p).unwrap();
        let [c1, c2, _] = detuned_power_coefficients(&p, PolynomialForm::AsPrinted).unwrap();
        let prefactor =
            HBAR * rates.omega_c / (2.0 * rates.kappa * rates.tunneling * rates.tunneling);
        let mismatch = rates.gamma * rates.kappa - rates.tunneling * rates.tunneling;
        assert_eq!(c1, prefactor * mismatch * mismatch);
        assert_eq!(c2, 0.0);
    }

    #[test]
    fn polynomial_is_singular_without_gain_or_tunneling() {
        let p = reference_params().with_tunneling_ratio(0.0);
        assert!(matches!(
            detuned_power_polynomial(&p, 1.0, PolynomialForm::AsPrinted),
            Err(ModelError::SingularPolynomial { .. })
        ));
    }

    #[test]
    fn detuned_solver_at_zero_power() {
        let p = reference_params()
            .with_detunings(1e6, 2e7)
            .with_input_power(0.0);
        assert_eq!(
            solve_detuned_photon_number(&p, PolynomialForm::AsPrinted).unwrap(),
            vec![0.0]
        );
    }

    #[test]
    fn self_consistent_roots_are_fixed_points() {
        let p = reference_params()
            .with_gain_loss_ratio(0.7)
            .with_detunings(4e6, 2.2e7)
            .with_input_power(2e-4);
        for n in solve_detuned_photon_number(&p, PolynomialForm::SelfConsistent).unwrap() {
            let s = steady_state_from_photon_number(&p, n, Branch::Unique).unwrap();
            assert!((s.photon_number_passive / n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn branch_tags() {
        assert_eq!(Branch::tags(1), &[Branch::Unique]);
        assert_eq!(Branch::tags(3)[1], Branch::Middle);
        assert!(Branch::tags(0).is_empty());
    }
}
