mod common;

use common::rel;
use num_complex::Complex64;
use ptphonon_core::dynamics::*;
use ptphonon_core::linear_response::{detuned_steady_state, eigen_stability};
use ptphonon_core::steady_state::{fields_at_displacement, passive_baseline};
use ptphonon_core::{derive_rates, SteadyState, SystemParams};

fn reference_params() -> SystemParams {
    SystemParams::reference()
}

/// Norm in the integrator's units: √photons, x₀ and x₀ω_m.
fn scaled_distance(p: &SystemParams, a: &State, b: &State) -> f64 {
    let r = derive_rates(p).unwrap();
    let d = [
        (a.a1 - b.a1).norm(),
        (a.a2 - b.a2).norm(),
        (a.x - b.x) / r.x_zpf,
        (a.v - b.v) / (r.x_zpf * r.mech_freq),
    ];
    d.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn scaled_size(p: &SystemParams, a: &State) -> f64 {
    scaled_distance(p, a, &State::zero())
}

fn perturbed(ss: &SteadyState, eps: f64) -> State {
    let mut s = State::from_steady_state(ss);
    s.a1 *= Complex64::new(1.0 + eps, 0.5 * eps);
    s.a2 *= 1.0 - eps;
    s.x *= 1.0 + eps;
    s
}

#[test]
fn linear_passive_pair_reaches_closed_form_fields() {
    // a huge radius switches off the radiation-pressure coupling
    let p = SystemParams {
        radius: 1e20,
        ..reference_params()
    }
    .passive_counterpart()
    .with_input_power(3e-6);
    let rates = derive_rates(&p).unwrap();
    let (a1, a2) = fields_at_displacement(&rates, 0.0);
    let opts = IntegrateOptions {
        tolerances: Tolerances {
            rtol: 1e-12,
            atol: 1e-12,
        },
        sample_interval: Some(1e-5),
        ..IntegrateOptions::default()
    };
    let traj = integrate(&p, &State::zero(), 1e-5, &opts).unwrap();
    let last = traj.last();
    assert!((last.a1 - a1).norm() / a1.norm() < 1e-8);
    assert!((last.a2 - a2).norm() / a2.norm() < 1e-8);
}

#[test]
fn free_ringdown_decays_at_half_the_damping_rate() {
    let p = reference_params().with_input_power(0.0);
    let r = derive_rates(&p).unwrap();
    let period = std::f64::consts::TAU / r.mech_freq;
    let initial = State {
        x: 1e3 * r.x_zpf,
        ..State::zero()
    };
    let opts = IntegrateOptions {
        tolerances: Tolerances {
            rtol: 1e-11,
            atol: 1e-12,
        },
        sample_interval: Some(period),
        ..IntegrateOptions::default()
    };
    let traj = integrate(&p, &initial, 400.0 * period, &opts).unwrap();
    // least-squares slope of ln(amplitude) against time, sampled once per period
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| {
            let amp = (s.x * s.x + (s.v / r.mech_freq).powi(2)).sqrt();
            (*t, amp.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mt, my) = (st / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mt) * (p.1 - my), a.1 + (p.0 - mt).powi(2))
    });
    let rate = -num / den;
    assert!(rel(rate, 0.5 * r.mech_damping) < 0.01, "{rate:e}");
}

/// Active, detuned and linearly stable: δ = 0.5, Δ₁ = Δ₂ = 0.03ω_m, 10 µW.
fn stable_detuned_point() -> SystemParams {
    let p = reference_params();
    p.with_gain_loss_ratio(0.5)
        .with_detunings(0.03 * p.mech_freq, 0.03 * p.mech_freq)
        .with_input_power(1e-5)
}

#[test]
fn settles_back_onto_stable_detuned_state() {
    let p = stable_detuned_point();
    let states = detuned_steady_state(&p).unwrap();
    assert_eq!(states.len(), 1);
    let ss = states[0];
    assert!(eigen_stability(&p, &ss).unwrap().stable);
    let settled = settle(&p, &perturbed(&ss, 1e-3), &SettleOptions::default()).unwrap();
    assert!(rel(settled.x_s, ss.x_s) < 1e-6);
    assert!(rel(settled.photon_number_passive, ss.photon_number_passive) < 1e-6);
    assert!((settled.a1 - ss.a1).norm() / ss.a1.norm() < 1e-6);
    assert!((settled.a2 - ss.a2).norm() / ss.a2.norm() < 1e-6);
}

#[test]
fn settles_onto_passive_baseline() {
    let p = reference_params()
        .passive_counterpart()
        .with_input_power(1e-6);
    let settled = settle(&p, &State::zero(), &SettleOptions::default()).unwrap();
    let closed = passive_baseline(&p).unwrap();
    assert!(rel(settled.x_s, closed.x_s) < 0.01);
    assert!(rel(settled.photon_number_passive, closed.photon_number_passive) < 0.01);
}

#[test]
fn marginal_balance_does_not_report_a_steady_state() {
    let p = reference_params().with_tunneling_ratio(2.0);
    let opts = SettleOptions {
        max_time: 2e-4,
        ..SettleOptions::default()
    };
    match settle(&p, &State::zero(), &opts) {
        Err(SettleError::NonSettling { .. }) | Err(SettleError::Diverged { .. }) => {}
        other => panic!("expected no steady state, got {other:?}"),
    }
}

#[test]
fn two_seeds_land_on_different_branches() {
    // two lossy resonators, Δ₂ = 0.3ω_m, inside the bistable window
    let base = reference_params();
    let p = base
        .with_detunings(0.0, 0.3 * base.mech_freq)
        .passive_counterpart()
        .with_input_power(4e-3);
    let states = detuned_steady_state(&p).unwrap();
    assert_eq!(states.len(), 3);
    let low = settle(&p, &State::zero(), &SettleOptions::default()).unwrap();
    let high = settle(&p, &perturbed(&states[2], 1e-2), &SettleOptions::default()).unwrap();
    assert!(rel(low.photon_number_passive, states[0].photon_number_passive) < 1e-5);
    assert!(rel(high.photon_number_passive, states[2].photon_number_passive) < 1e-5);
}

#[test]
fn fixed_step_error_has_fifth_order_slope() {
    let base = reference_params();
    let p = base
        .passive_counterpart()
        .with_detunings(0.1 * base.mech_freq, 0.2 * base.mech_freq)
        .with_input_power(1e-4);
    let ss = detuned_steady_state(&p).unwrap()[0];
    let start = perturbed(&ss, 0.2);
    let t = 2e-8;
    let reference = integrate_fixed_step(&p, &start, t, 12_800).unwrap();
    let errs: Vec<f64> = [16usize, 32, 64, 128]
        .iter()
        .map(|n| {
            let end = integrate_fixed_step(&p, &start, t, *n).unwrap();
            scaled_distance(&p, &end, &reference)
        })
        .collect();
    for w in errs.windows(2) {
        let slope = (w[0] / w[1]).log2();
        assert!((slope - 5.0).abs() <= 0.5, "slope {slope} from {errs:?}");
    }
}

#[test]
fn adaptive_error_shrinks_with_tolerance() {
    let base = reference_params();
    let p = base
        .passive_counterpart()
        .with_detunings(0.1 * base.mech_freq, 0.2 * base.mech_freq)
        .with_input_power(1e-4);
    let ss = detuned_steady_state(&p).unwrap()[0];
    let start = perturbed(&ss, 0.2);
    let t = 5e-8;
    let run = |rtol: f64| {
        let o = IntegrateOptions {
            tolerances: Tolerances { rtol, atol: rtol },
            sample_interval: Some(t),
            ..IntegrateOptions::default()
        };
        *integrate(&p, &start, t, &o).unwrap().last()
    };
    let reference = run(1e-14);
    let mut prev = f64::INFINITY;
    for rtol in [1e-6, 1e-7, 1e-8, 1e-9] {
        let e = scaled_distance(&p, &run(rtol), &reference);
        assert!(e < prev);
        prev = e;
    }
}

#[test]
fn autonomous_in_time() {
    let p = stable_detuned_point();
    let start = perturbed(&detuned_steady_state(&p).unwrap()[0], 0.05);
    let run = |t0: f64| {
        let o = IntegrateOptions {
            t0,
            ..IntegrateOptions::default()
        };
        integrate(&p, &start, 3e-7, &o).unwrap()
    };
    let a = run(0.0);
    let b = run(1.0e-3);
    let d = scaled_distance(&p, a.last(), b.last());
    assert!(d < 1e-7 * scaled_size(&p, a.last()), "{d:e}");
    assert!(rel(b.times.last().unwrap() - b.times[0], 3e-7) < 1e-9);
}

#[test]
fn divergence_is_flagged() {
    // broken regime with net gain and no saturation
    let p = reference_params()
        .with_gain_loss_ratio(2.0)
        .with_tunneling_ratio(0.2);
    let traj = integrate(&p, &State::zero(), 1e-3, &IntegrateOptions::default()).unwrap();
    assert_eq!(traj.terminal, Terminal::Diverged);
    assert!(traj.states[..traj.states.len() - 1]
        .iter()
        .all(State::is_finite));
}

#[test]
fn dynamics_agree_with_linear_stability() {
    let base = reference_params();
    let mut checked = 0;
    for delta in [-1.0, 0.0, 0.3, 0.5, 0.8] {
        for power in [1e-6, 1e-5, 1e-4, 1e-3] {
            let mut p = base
                .with_gain_loss_ratio(delta)
                .with_detunings(0.03 * base.mech_freq, 0.03 * base.mech_freq)
                .with_input_power(power);
            if delta < 0.0 {
                p = p.passive_counterpart();
            }
            let ss = detuned_steady_state(&p).unwrap()[0];
            let verdict = eigen_stability(&p, &ss).unwrap();
            let mut start = State::from_steady_state(&ss);
            start.x += 1e-4 * ss.x_s.abs().max(1e3 * derive_rates(&p).unwrap().x_zpf);
            let d0 = scaled_distance(&p, &start, &State::from_steady_state(&ss));
            let r = derive_rates(&p).unwrap();
            let period = std::f64::consts::TAU / r.mech_freq;
            if verdict.stable {
                let ten =
                    integrate(&p, &start, 10.0 * period, &IntegrateOptions::default()).unwrap();
                let d10 = scaled_distance(&p, ten.last(), &State::from_steady_state(&ss));
                assert!(d10 < d0, "δ={delta} P={power}: deviation grew");
                let settled = settle(&p, &start, &SettleOptions::default()).unwrap();
                assert!(rel(settled.photon_number_passive, ss.photon_number_passive) < 1e-5);
            } else {
                let horizon = 20.0 / verdict.max_real_part;
                let o = IntegrateOptions {
                    sample_interval: Some(horizon),
                    ..IntegrateOptions::default()
                };
                let tr = integrate(&p, &start, horizon, &o).unwrap();
                let d = scaled_distance(&p, tr.last(), &State::from_steady_state(&ss));
                assert!(
                    tr.terminal == Terminal::Diverged || d > 10.0 * d0,
                    "δ={delta} P={power}: perturbation did not grow"
                );
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 20);
}
