//! Time-domain integration of the mean-field equations with an embedded
//! Dormand–Prince 5(4) pair.
//!
//! The integrator works on `(a₁, a₂, x/x₀, ẋ/(x₀ω_m))` so that one absolute
//! tolerance is meaningful for every component; states are exchanged in SI.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::ModelError;
use crate::math::{self, HBAR, TAU};
use crate::model::{derive_rates, DerivedRates, SystemParams};
use crate::steady_state::{Branch, SteadyState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub a1: Complex64,
    pub a2: Complex64,
    /// Displacement (m).
    pub x: f64,
    /// Velocity (m/s).
    pub v: f64,
}

impl State {
    pub fn zero() -> Self {
        State {
            a1: Complex64::new(0.0, 0.0),
            a2: Complex64::new(0.0, 0.0),
            x: 0.0,
            v: 0.0,
        }
    }

    pub fn from_steady_state(ss: &SteadyState) -> Self {
        State {
            a1: ss.a1,
            a2: ss.a2,
            x: ss.x_s,
            v: 0.0,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.a1.re, self.a1.im, self.a2.re, self.a2.im, self.x, self.v,
        ]
    }

    pub fn from_array(y: &[f64; 6]) -> Self {
        State {
            a1: Complex64::new(y[0], y[1]),
            a2: Complex64::new(y[2], y[3]),
            x: y[4],
            v: y[5],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Right-hand side in SI, state ordered `(Re a₁, Im a₁, Re a₂, Im a₂, x, ẋ)`.
pub fn vector_field(rates: &DerivedRates, y: &[f64; 6]) -> [f64; 6] {
    let r = rates;
    let drive = math::sqrt(2.0 * r.input_coupling) * r.drive_amplitude();
    let [p, q, re, im, x, v] = *y;
    let de = r.detuning_2 - r.com_coupling * x;
    [
        r.kappa * p + r.detuning_1 * q - r.tunneling * im + drive,
        r.kappa * q - r.detuning_1 * p + r.tunneling * re,
        -r.gamma * re + de * im - r.tunneling * q,
        -r.gamma * im - de * re + r.tunneling * p,
        v,
        -r.mech_damping * v - r.mech_freq * r.mech_freq * x
            + HBAR * r.com_coupling * (re * re + im * im) / r.mech_mass,
    ]
}

/// Scaled system used by the integrator.
struct Scaled {
    rates: DerivedRates,
    drive: f64,
    x_ref: f64,
    force: f64,
}

impl Scaled {
    fn new(rates: DerivedRates) -> Self {
        let x_ref = rates.x_zpf;
        Scaled {
            drive: math::sqrt(2.0 * rates.input_coupling) * rates.drive_amplitude(),
            force: HBAR * rates.com_coupling / (rates.mech_mass * x_ref * rates.mech_freq),
            x_ref,
            rates,
        }
    }

    fn to_scaled(&self, s: &State) -> [f64; 6] {
        let v_ref = self.x_ref * self.rates.mech_freq;
        [
            s.a1.re,
            s.a1.im,
            s.a2.re,
            s.a2.im,
            s.x / self.x_ref,
            s.v / v_ref,
        ]
    }

    fn to_state(&self, y: &[f64; 6]) -> State {
        let v_ref = self.x_ref * self.rates.mech_freq;
        State {
            a1: Complex64::new(y[0], y[1]),
            a2: Complex64::new(y[2], y[3]),
            x: y[4] * self.x_ref,
            v: y[5] * v_ref,
        }
    }

    fn rhs(&self, y: &[f64; 6]) -> [f64; 6] {
        let r = &self.rates;
        let [p, q, re, im, u, w] = *y;
        let de = r.detuning_2 - r.com_coupling * self.x_ref * u;
        [
            r.kappa * p + r.detuning_1 * q - r.tunneling * im + self.drive,
            r.kappa * q - r.detuning_1 * p + r.tunneling * re,
            -r.gamma * re + de * im - r.tunneling * q,
            -r.gamma * im - de * re + r.tunneling * p,
            r.mech_freq * w,
            -r.mech_damping * w - r.mech_freq * u + self.force * (re * re + im * im),
        ]
    }

    fn fastest_rate(&self) -> f64 {
        let r = &self.rates;
        [
            r.mech_freq,
            r.tunneling,
            r.gamma,
            r.kappa,
            r.detuning_1,
            r.detuning_2,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One step; returns the fifth-order solution and the embedded error
/// estimate. `k0` is the derivative at `y` (first-same-as-last).
fn dopri_step(sys: &Scaled, y: &[f64; 6], k0: &[f64; 6], h: f64) -> ([f64; 6], [f64; 6], [f64; 6]) {
    let mut k = [[0.0; 6]; 7];
    k[0] = *k0;
    for stage in 1..7 {
        let mut ys = *y;
        for (j, a) in A[stage].iter().enumerate().take(stage) {
            if *a != 0.0 {
                for i in 0..6 {
                    ys[i] += h * a * k[j][i];
                }
            }
        }
        debug_assert!(C[stage] >= 0.0);
        k[stage] = sys.rhs(&ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; 6];
    for i in 0..6 {
        let mut inc5 = 0.0;
        let mut inc4 = 0.0;
        for stage in 0..7 {
            inc5 += B5[stage] * k[stage][i];
            inc4 += B4[stage] * k[stage][i];
        }
        y5[i] += h * inc5;
        err[i] = h * (inc5 - inc4);
    }
    (y5, err, k[6])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    /// Absolute tolerance in scaled units (√photons, x₀, x₀ω_m).
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-9,
            atol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub tolerances: Tolerances,
    /// Defaults to `2π/(50·max(ω_m, J, γ, |κ|, |Δ₁|, |Δ₂|))`.
    pub max_step: Option<f64>,
    /// Photon number above which the run is flagged as diverged.
    pub divergence_bound: f64,
    /// Record states only at multiples of this interval (plus the ends).
    pub sample_interval: Option<f64>,
    /// Stop as `Converged` once the relative change over one mechanical
    /// period falls below this value.
    pub convergence_tol: Option<f64>,
    pub t0: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tolerances: Tolerances::default(),
            max_step: None,
            divergence_bound: 1e12,
            sample_interval: None,
            convergence_tol: None,
            t0: 0.0,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Converged,
    MaxTimeReached,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub terminal: Terminal,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trajectory holds its initial state")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid integration input: {0}")]
    InvalidInput(&'static str),
    #[error("step size underflow at t = {time:e}")]
    StepSizeUnderflow { time: f64, partial: Trajectory },
    #[error("step limit reached at t = {time:e}")]
    StepLimit { time: f64, partial: Trajectory },
}

fn error_norm(err: &[f64; 6], y0: &[f64; 6], y1: &[f64; 6], tol: &Tolerances) -> f64 {
    let mut sum = 0.0;
    for i in 0..6 {
        let scale = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / scale;
        sum += e * e;
    }
    math::sqrt(sum / 6.0)
}

fn norm(y: &[f64; 6]) -> f64 {
    math::sqrt(y.iter().map(|v| v * v).sum())
}

fn photons_exceed(y: &[f64; 6], bound: f64) -> bool {
    let n1 = y[0] * y[0] + y[1] * y[1];
    let n2 = y[2] * y[2] + y[3] * y[3];
    !(n1 <= bound && n2 <= bound) || y.iter().any(|v| !v.is_finite())
}

/// Default maximum step for the given parameters.
pub fn default_max_step(params: &SystemParams) -> Result<f64, ModelError> {
    let sys = Scaled::new(derive_rates(params)?);
    Ok(TAU / (50.0 * sys.fastest_rate()))
}

pub fn integrate(
    params: &SystemParams,
    initial: &State,
    t_max: f64,
    options: &IntegrateOptions,
) -> Result<Trajectory, IntegrationError> {
    let sys = Scaled::new(derive_rates(params)?);
    let tol = options.tolerances;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(IntegrationError::InvalidInput(
            "t_max must be finite and > 0",
        ));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(IntegrationError::InvalidInput("tolerances must be > 0"));
    }
    if !initial.is_finite() {
        return Err(IntegrationError::InvalidInput(
            "initial state must be finite",
        ));
    }
    let max_step = options
        .max_step
        .unwrap_or_else(|| TAU / (50.0 * sys.fastest_rate()));
    if !(max_step > 0.0) {
        return Err(IntegrationError::InvalidInput("max_step must be > 0"));
    }
    let period = TAU / sys.rates.mech_freq;
    let t_end = options.t0 + t_max;

    let mut y = sys.to_scaled(initial);
    let mut t = options.t0;
    let mut trajectory = Trajectory {
        times: alloc::vec![t],
        states: alloc::vec![*initial],
        terminal: Terminal::MaxTimeReached,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    if photons_exceed(&y, options.divergence_bound) {
        trajectory.terminal = Terminal::Diverged;
        return Ok(trajectory);
    }

    let mut k0 = sys.rhs(&y);
    let mut h = 0.1 * max_step;
    let mut next_sample = options.sample_interval.map(|dt| (1usize, dt));
    let mut period_index = 1usize;
    let mut reference = y;

    loop {
        let mut target = t_end;
        if let Some((i, dt)) = next_sample {
            target = target.min(options.t0 + i as f64 * dt);
        }
        if options.convergence_tol.is_some() {
            target = target.min(options.t0 + period_index as f64 * period);
        }
        let remaining = target - t;
        let mut step = h.min(max_step);
        let lands = step >= remaining;
        if lands {
            step = remaining;
        }
        if step <= 16.0 * f64::EPSILON * t.abs().max(max_step) {
            if remaining <= 16.0 * f64::EPSILON * t.abs().max(max_step) {
                // target already reached within rounding
                t = target;
            } else {
                return Err(IntegrationError::StepSizeUnderflow {
                    time: t,
                    partial: trajectory,
                });
            }
        } else {
            if trajectory.accepted_steps + trajectory.rejected_steps >= options.max_steps {
                return Err(IntegrationError::StepLimit {
                    time: t,
                    partial: trajectory,
                });
            }
            let (y_new, err, k_last) = dopri_step(&sys, &y, &k0, step);
            let e = error_norm(&err, &y, &y_new, &tol);
            if !(e <= 1.0) {
                trajectory.rejected_steps += 1;
                let factor = if e.is_finite() {
                    (0.9 * math::powf(e, -0.2)).max(0.2)
                } else {
                    0.2
                };
                h = step * factor;
                continue;
            }
            trajectory.accepted_steps += 1;
            t = if lands { target } else { t + step };
            y = y_new;
            k0 = k_last;
            let factor = if e == 0.0 {
                5.0
            } else {
                (0.9 * math::powf(e, -0.2)).clamp(0.2, 5.0)
            };
            if !lands {
                h = step * factor;
            } else {
                h = h.max(step * factor);
            }
            if photons_exceed(&y, options.divergence_bound) {
                trajectory.times.push(t);
                trajectory.states.push(sys.to_state(&y));
                trajectory.terminal = Terminal::Diverged;
                return Ok(trajectory);
            }
        }

        let at_end = t >= t_end;
        let mut record = options.sample_interval.is_none() || at_end;
        if let Some((i, dt)) = next_sample {
            if t >= options.t0 + i as f64 * dt {
                record = true;
                next_sample = Some((i + 1, dt));
            }
        }
        let mut converged = false;
        if let Some(ctol) = options.convergence_tol {
            if t >= options.t0 + period_index as f64 * period {
                period_index += 1;
                let mut diff = y;
                for (d, r) in diff.iter_mut().zip(&reference) {
                    *d -= r;
                }
                let change = norm(&diff);
                let size = norm(&y);
                // scaled units: the floor is one photon amplitude or one x₀
                converged = change <= ctol * size.max(1.0);
                reference = y;
            }
        }
        if record || converged {
            trajectory.times.push(t);
            trajectory.states.push(sys.to_state(&y));
        }
        if converged {
            trajectory.terminal = Terminal::Converged;
            return Ok(trajectory);
        }
        if at_end {
            return Ok(trajectory);
        }
    }
}

/// `steps` equal Dormand–Prince steps (fifth-order solution); used to
/// measure the order of the scheme.
pub fn integrate_fixed_step(
    params: &SystemParams,
    initial: &State,
    t_max: f64,
    steps: usize,
) -> Result<State, IntegrationError> {
    if steps == 0 || !(t_max > 0.0) {
        return Err(IntegrationError::InvalidInput(
            "need t_max > 0 and steps > 0",
        ));
    }
    let sys = Scaled::new(derive_rates(params)?);
    let h = t_max / steps as f64;
    let mut y = sys.to_scaled(initial);
    for _ in 0..steps {
        let k0 = sys.rhs(&y);
        y = dopri_step(&sys, &y, &k0, h).0;
    }
    Ok(sys.to_state(&y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleOptions {
    pub tolerances: Tolerances,
    pub max_time: f64,
    /// Relative change per mechanical period regarded as settled.
    pub convergence_tol: f64,
}

impl Default for SettleOptions {
    fn default() -> Self {
        SettleOptions {
            tolerances: Tolerances {
                rtol: 1e-11,
                atol: 1e-9,
            },
            max_time: 2e-3,
            convergence_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SettleError {
    #[error("trajectory did not settle within the time limit")]
    NonSettling { last: State },
    #[error("trajectory diverged")]
    Diverged { last: State },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

impl From<ModelError> for SettleError {
    fn from(e: ModelError) -> Self {
        SettleError::Integration(IntegrationError::Model(e))
    }
}

fn package(s: &State) -> SteadyState {
    SteadyState {
        x_s: s.x,
        a1: s.a1,
        a2: s.a2,
        photon_number_passive: s.a2.norm_sqr(),
        branch: Branch::Unique,
    }
}

/// Integrates until the relative change per mechanical period drops below
/// the tolerance. Marginal dynamics surface as [`SettleError::NonSettling`].
pub fn settle(
    params: &SystemParams,
    initial: &State,
    options: &SettleOptions,
) -> Result<SteadyState, SettleError> {
    let rates = derive_rates(params)?;
    if vector_field(&rates, &initial.to_array())
        .iter()
        .all(|v| *v == 0.0)
    {
        return Ok(package(initial));
    }
    let run = IntegrateOptions {
        tolerances: options.tolerances,
        convergence_tol: Some(options.convergence_tol),
        sample_interval: Some(options.max_time),
        ..IntegrateOptions::default()
    };
    let trajectory = integrate(params, initial, options.max_time, &run)?;
    let last = *trajectory.last();
    match trajectory.terminal {
        Terminal::Converged => Ok(package(&last)),
        Terminal::MaxTimeReached => Err(SettleError::NonSettling { last }),
        Terminal::Diverged => Err(SettleError::Diverged { last }),
    }
}
