//! Physical inputs of the two-resonator system and the effective rates
//! derived from them.
//!
//! Every rate is an angular rate (rad/s). Anything reported as a frequency
//! is the angular value divided by 2π, see [`DerivedRates::reported`].

use crate::error::ModelError;
use crate::math::{self, HBAR, SPEED_OF_LIGHT, TAU};

/// How the optical carrier frequency is obtained from the wavelength.
///
/// `Cyclic` takes `ω_c = c/λ` and uses that number directly in
/// `γ = ω_c/Q_c` and `g = ω_c/R`, with `ω_m = 2π × 23.4 MHz` still angular.
/// The reference values of η, ξ and the passive threshold follow from it.
/// `Angular` uses `ω_c = 2πc/λ` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OpticalConvention {
    #[default]
    Cyclic,
    Angular,
}

impl OpticalConvention {
    /// Factor `k` in `ω_c = k·c/λ`.
    pub fn carrier_factor(self) -> f64 {
        match self {
            OpticalConvention::Cyclic => 1.0,
            OpticalConvention::Angular => TAU,
        }
    }
}

/// Rate at which the external drive couples into the active resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputCoupling {
    /// The drive enters through `√(2κ)`, tied to the optical gain.
    GainCoupled,
    /// The drive enters through `√(2·rate)` with an independent rate (rad/s).
    FixedRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Signal-band vacuum wavelength λ (m).
    pub wavelength: f64,
    /// Optical quality factor Q_c.
    pub cavity_q: f64,
    /// δ = κ/γ. Negative values turn the active resonator into a second lossy one.
    pub gain_loss_ratio: f64,
    /// J/γ.
    pub tunneling_rate_ratio: f64,
    /// Microtoroid radius R (m).
    pub radius: f64,
    /// ω_m (rad/s).
    pub mech_freq: f64,
    /// Effective mass m (kg).
    pub mech_mass: f64,
    /// Γ_m (1/s).
    pub mech_damping: f64,
    /// Δ₁ = ω_{c,1} − ω_L (rad/s).
    pub detuning_1: f64,
    /// Δ₂ = ω_{c,2} − ω_L (rad/s).
    pub detuning_2: f64,
    /// P_in (W).
    pub input_power: f64,
    pub input_coupling: InputCoupling,
    pub convention: OpticalConvention,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl SystemParams {
    /// Experimental parameter set: λ = 1550 nm, Q_c = 3×10⁷, R = 34.5 µm,
    /// ω_m = 2π×23.4 MHz, m = 5×10⁻¹¹ kg, Γ_m = 2.4×10⁵ s⁻¹, at gain-loss
    /// balance with J = γ, zero detunings and P_in = 1 µW.
    pub fn reference() -> Self {
        SystemParams {
            wavelength: 1550e-9,
            cavity_q: 3e7,
            gain_loss_ratio: 1.0,
            tunneling_rate_ratio: 1.0,
            radius: 34.5e-6,
            mech_freq: TAU * 23.4e6,
            mech_mass: 5e-11,
            mech_damping: 2.4e5,
            detuning_1: 0.0,
            detuning_2: 0.0,
            input_power: 1e-6,
            input_coupling: InputCoupling::GainCoupled,
            convention: OpticalConvention::Cyclic,
        }
    }

    pub fn with_input_power(mut self, watts: f64) -> Self {
        self.input_power = watts;
        self
    }

    pub fn with_gain_loss_ratio(mut self, delta: f64) -> Self {
        self.gain_loss_ratio = delta;
        self
    }

    pub fn with_tunneling_ratio(mut self, j_over_gamma: f64) -> Self {
        self.tunneling_rate_ratio = j_over_gamma;
        self
    }

    pub fn with_detunings(mut self, detuning_1: f64, detuning_2: f64) -> Self {
        self.detuning_1 = detuning_1;
        self.detuning_2 = detuning_2;
        self
    }

    /// Two coupled lossy resonators: κ → −γ and the drive enters through √(2γ).
    pub fn passive_counterpart(&self) -> Self {
        let gamma = self.passive_loss();
        SystemParams {
            gain_loss_ratio: -1.0,
            input_coupling: InputCoupling::FixedRate(gamma),
            ..*self
        }
    }

    /// J/γ that places the supermode splitting exactly on ω_m, i.e.
    /// `2·sqrt(J² − (κ+γ)²/4) = ω_m`.
    pub fn tunneling_ratio_for_splitting(&self, splitting: f64) -> f64 {
        let gamma = self.passive_loss();
        let half_sum = 0.5 * (self.gain_loss_ratio + 1.0) * gamma;
        math::sqrt(0.25 * splitting * splitting + half_sum * half_sum) / gamma
    }

    pub(crate) fn passive_loss(&self) -> f64 {
        self.convention.carrier_factor() * SPEED_OF_LIGHT / self.wavelength / self.cavity_q
    }

    pub fn has_detuning(&self) -> bool {
        self.detuning_1 != 0.0 || self.detuning_2 != 0.0
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                })
            }
        }
        fn non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and >= 0",
                })
            }
        }
        fn finite(name: &'static str, value: f64) -> Result<(), ModelError> {
            if value.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                })
            }
        }
        positive("wavelength", self.wavelength)?;
        positive("cavity_q", self.cavity_q)?;
        positive("radius", self.radius)?;
        positive("mech_freq", self.mech_freq)?;
        positive("mech_mass", self.mech_mass)?;
        non_negative("mech_damping", self.mech_damping)?;
        non_negative("input_power", self.input_power)?;
        non_negative("tunneling_rate_ratio", self.tunneling_rate_ratio)?;
        finite("gain_loss_ratio", self.gain_loss_ratio)?;
        finite("detuning_1", self.detuning_1)?;
        finite("detuning_2", self.detuning_2)?;
        match self.input_coupling {
            InputCoupling::GainCoupled if self.gain_loss_ratio < 0.0 => Err(
                ModelError::NegativeGainCoupling(self.gain_loss_ratio * self.passive_loss()),
            ),
            InputCoupling::FixedRate(rate) => non_negative("input_coupling_rate", rate),
            InputCoupling::GainCoupled => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// ω_c (rad/s).
    pub omega_c: f64,
    /// γ = ω_c/Q_c (1/s).
    pub gamma: f64,
    /// κ = δγ (1/s).
    pub kappa: f64,
    /// J (1/s).
    pub tunneling: f64,
    /// g = ω_c/R (1/(s m)).
    pub com_coupling: f64,
    /// x₀ = sqrt(ħ/(2mω_m)) (m).
    pub x_zpf: f64,
    /// |f_in|² = P_in/(ħω_c) (1/s).
    pub photon_flux: f64,
    /// Rate entering the drive term √(2·rate)·f_in (1/s).
    pub input_coupling: f64,
    pub mech_freq: f64,
    pub mech_damping: f64,
    pub mech_mass: f64,
    pub detuning_1: f64,
    pub detuning_2: f64,
    pub input_power: f64,
}

/// Rates divided by 2π, for output in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportedRates {
    pub omega_c_hz: f64,
    pub gamma_hz: f64,
    pub kappa_hz: f64,
    pub tunneling_hz: f64,
    /// Hz per metre; divide by 10⁹ twice for GHz/nm.
    pub com_coupling_hz_per_m: f64,
    pub mech_freq_hz: f64,
}

pub fn derive_rates(params: &SystemParams) -> Result<DerivedRates, ModelError> {
    params.validate()?;
    let omega_c = params.convention.carrier_factor() * SPEED_OF_LIGHT / params.wavelength;
    let gamma = omega_c / params.cavity_q;
    let kappa = params.gain_loss_ratio * gamma;
    let input_coupling = match params.input_coupling {
        InputCoupling::GainCoupled => kappa,
        InputCoupling::FixedRate(rate) => rate,
    };
    Ok(DerivedRates {
        omega_c,
        gamma,
        kappa,
        tunneling: params.tunneling_rate_ratio * gamma,
        com_coupling: omega_c / params.radius,
        x_zpf: math::sqrt(HBAR / (2.0 * params.mech_mass * params.mech_freq)),
        photon_flux: params.input_power / (HBAR * omega_c),
        input_coupling,
        mech_freq: params.mech_freq,
        mech_damping: params.mech_damping,
        mech_mass: params.mech_mass,
        detuning_1: params.detuning_1,
        detuning_2: params.detuning_2,
        input_power: params.input_power,
    })
}

impl DerivedRates {
    /// Mean drive amplitude f_in = sqrt(photon flux), real and non-negative.
    pub fn drive_amplitude(&self) -> f64 {
        math::sqrt(self.photon_flux)
    }

    /// Single-photon optomechanical rate g·x₀ (1/s).
    pub fn vacuum_coupling(&self) -> f64 {
        self.com_coupling * self.x_zpf
    }

    /// Radiation-pressure shift per photon, ħg²/(mω_m²): `g·x_s = shift · N`.
    pub fn photon_shift(&self) -> f64 {
        HBAR * self.com_coupling * self.com_coupling
            / (self.mech_mass * self.mech_freq * self.mech_freq)
    }

    pub fn reported(&self) -> ReportedRates {
        ReportedRates {
            omega_c_hz: self.omega_c / TAU,
            gamma_hz: self.gamma / TAU,
            kappa_hz: self.kappa / TAU,
            tunneling_hz: self.tunneling / TAU,
            com_coupling_hz_per_m: self.com_coupling / TAU,
            mech_freq_hz: self.mech_freq / TAU,
        }
    }
}

/// Optical inputs recovered from reported (Hz) rates; the inverse of
/// [`derive_rates`] followed by [`DerivedRates::reported`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredOptics {
    pub wavelength: f64,
    pub cavity_q: f64,
    pub gain_loss_ratio: f64,
    pub tunneling_rate_ratio: f64,
    pub radius: f64,
    pub mech_freq: f64,
}

impl ReportedRates {
    pub fn recover(&self, convention: OpticalConvention) -> RecoveredOptics {
        let omega_c = self.omega_c_hz * TAU;
        RecoveredOptics {
            wavelength: convention.carrier_factor() * SPEED_OF_LIGHT / omega_c,
            cavity_q: self.omega_c_hz / self.gamma_hz,
            gain_loss_ratio: self.kappa_hz / self.gamma_hz,
            tunneling_rate_ratio: self.tunneling_hz / self.gamma_hz,
            radius: self.omega_c_hz / self.com_coupling_hz_per_m,
            mech_freq: self.mech_freq_hz * TAU,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_convention_matches_quoted_rates() {
        let params = SystemParams {
            convention: OpticalConvention::Angular,
            ..SystemParams::reference()
        };
        let reported = derive_rates(&params).unwrap().reported();
        assert!((reported.gamma_hz / 6.45e6 - 1.0).abs() < 0.005);
        // GHz/nm = 1e18 Hz/m
        assert!((reported.com_coupling_hz_per_m / 5.61e18 - 1.0).abs() < 0.005);
    }

    #[test]
    fn cyclic_convention_quotes_the_same_numbers_as_rates() {
        let rates = derive_rates(&SystemParams::reference()).unwrap();
        assert!((rates.gamma / 6.45e6 - 1.0).abs() < 0.005);
        assert!((rates.com_coupling / 5.61e18 - 1.0).abs() < 0.005);
    }

    #[test]
    fn loss_scales_inversely_with_quality_factor() {
        let base = SystemParams::reference();
        let ten_q = SystemParams {
            cavity_q: 10.0 * base.cavity_q,
            ..base
        };
        let g1 = derive_rates(&base).unwrap().gamma;
        let g10 = derive_rates(&ten_q).unwrap().gamma;
        assert!(((g1 / 10.0) / g10 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_point_amplitude_hand_value() {
        // sqrt(1.054571817e-34 / (2 * 5e-11 * 2π * 23.4e6)) evaluated by hand:
        // 2 m ω_m = 1.470265e-2, ratio = 7.172686e-33, root = 8.46917e-17 m.
        let rates = derive_rates(&SystemParams::reference()).unwrap();
        assert!((rates.x_zpf / 8.46917e-17 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn exact_definitional_identities() {
        let params = SystemParams::reference();
        let rates = derive_rates(&params).unwrap();
        assert_eq!(rates.gamma, rates.omega_c / params.cavity_q);
        assert!((rates.com_coupling * params.radius / rates.omega_c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_geometry() {
        for mutate in [
            |p: &mut SystemParams| p.wavelength = 0.0,
            |p: &mut SystemParams| p.cavity_q = -1.0,
            |p: &mut SystemParams| p.radius = 0.0,
            |p: &mut SystemParams| p.mech_mass = 0.0,
            |p: &mut SystemParams| p.mech_freq = f64::NAN,
        ] {
            let mut p = SystemParams::reference();
            mutate(&mut p);
            assert!(matches!(
                derive_rates(&p),
                Err(ModelError::InvalidParameter { .. })
            ));
        }
    }

    #[test]
    fn gain_coupled_port_needs_non_negative_gain() {
        let p = SystemParams::reference().with_gain_loss_ratio(-0.5);
        assert!(matches!(
            derive_rates(&p),
            Err(ModelError::NegativeGainCoupling(_))
        ));
        assert!(derive_rates(&p.passive_counterpart()).is_ok());
    }

    #[test]
    fn unit_round_trip() {
        for convention in [OpticalConvention::Cyclic, OpticalConvention::Angular] {
            let params = SystemParams {
                convention,
                gain_loss_ratio: 0.73,
                tunneling_rate_ratio: 1.9,
                ..SystemParams::reference()
            };
            let back = derive_rates(&params)
                .unwrap()
                .reported()
                .recover(convention);
            for (a, b) in [
                (back.wavelength, params.wavelength),
                (back.cavity_q, params.cavity_q),
                (back.gain_loss_ratio, params.gain_loss_ratio),
                (back.tunneling_rate_ratio, params.tunneling_rate_ratio),
                (back.radius, params.radius),
                (back.mech_freq, params.mech_freq),
            ] {
                assert!((a / b - 1.0).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn splitting_tuned_tunneling_rate() {
        let p = SystemParams::reference().with_gain_loss_ratio(0.5);
        let j = p.tunneling_ratio_for_splitting(p.mech_freq);
        let rates = derive_rates(&p.with_tunneling_ratio(j)).unwrap();
        let half = 0.5 * (rates.kappa + rates.gamma);
        let split = 2.0 * math::sqrt(rates.tunneling * rates.tunneling - half * half);
        assert!((split / p.mech_freq - 1.0).abs() < 1e-12);
    }
}
