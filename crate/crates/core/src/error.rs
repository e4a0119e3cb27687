use thiserror::Error;

/// Failures of the algebraic model: invalid inputs, violated preconditions
/// and the genuine singularities of the formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(
        "input coupling rate is zero while the drive is nonzero (gain-coupled port with κ = 0)"
    )]
    DegenerateInputCoupling,
    #[error("gain-coupled input requires κ ≥ 0, got κ = {0}; use a fixed-rate input coupling")]
    NegativeGainCoupling(f64),
    #[error("operation requires zero detunings (Δ₁ = {0}, Δ₂ = {1}); use the detuned solver")]
    DetuningsPresent(f64, f64),
    #[error("closed form requires J² = κγ (relative mismatch {0:e}); use solve_force_balance")]
    UnbalancedCoupling(f64),
    #[error("amplification factor diverges at zero input power")]
    DivergentAmplification,
    #[error("polynomial prefactor 1/(2κJ²) is singular (κ = {kappa}, J = {tunneling})")]
    SingularPolynomial { kappa: f64, tunneling: f64 },
    #[error("photon number must be non-negative, got {0}")]
    NegativePhotonNumber(f64),
    #[error("cavity factor has a pole at ω = Δω with κ = γ")]
    ResonantDivergence,
    #[error("no phonon lasing in the broken-PT regime")]
    NoLasing,
    #[error("supermode population diverges: γ₊ + γ₋ = 0")]
    DivergentPopulation,
}
