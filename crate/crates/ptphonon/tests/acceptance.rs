//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::Command;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ptphonon::presets::{figure_preset, stability_agreement, Preset};
use ptphonon::table::{flags, split_csv, Table};
use ptphonon_core::dynamics::{
    integrate, settle, vector_field, IntegrateOptions, SettleOptions, State, Tolerances,
};
use ptphonon_core::linear_response::{build_jacobian, detuned_steady_state, eigen_stability};
use ptphonon_core::steady_state::*;
use ptphonon_core::supermodes::*;
use ptphonon_core::{derive_rates, SystemParams};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn reference_params() -> SystemParams {
    SystemParams::reference()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion_1() -> Outcome {
    let e1 = amplification_eta(&reference_params().with_input_power(1e-6)).unwrap();
    let e7 = amplification_eta(&reference_params().with_input_power(7e-6)).unwrap();
    let ratio = e1 / e7;
    let want = 7f64.powf(2.0 / 3.0);
    let pass = rel(e1, 106.0) <= 0.25 && rel(e7, 29.5) <= 0.25 && rel(ratio, want) < 1e-9;
    outcome(
        pass,
        format!(
            "eta(1uW) = {e1:.3}, eta(7uW) = {e7:.3}, ratio error {:.1e}",
            rel(ratio, want)
        ),
    )
}

fn criterion_2() -> Outcome {
    let x1 = relative_xi(
        &reference_params().with_input_power(1e-6),
        PASSIVE_THRESHOLD_REFERENCE,
    )
    .unwrap();
    let x7 = relative_xi(
        &reference_params().with_input_power(7e-6),
        PASSIVE_THRESHOLD_REFERENCE,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for delta in [0.3, 0.8, 1.0, 1.7] {
        for power in [1e-9, 1e-7, 1e-6, 7e-6, 3e-5] {
            let p = reference_params()
                .with_gain_loss_ratio(delta)
                .with_input_power(power);
            let s = solve_force_balance(&p).unwrap()[0];
            let xi = relative_xi_for_state(&p, &s, 7e-6).unwrap();
            let eta = eta_for_state(&p, &s).unwrap();
            worst = worst.max(rel(xi, eta * power / 7e-6));
        }
    }
    let pass = rel(x1, 15.9) <= 0.25 && rel(x7, 29.5) <= 0.25 && worst < 1e-9;
    outcome(
        pass,
        format!("xi(1uW) = {x1:.3}, xi(7uW) = {x7:.3}, identity error {worst:.1e}"),
    )
}

fn matched(p: SystemParams) -> SystemParams {
    p.with_tunneling_ratio(p.tunneling_ratio_for_splitting(p.mech_freq))
}

fn criterion_3() -> Outcome {
    let passive = reference_params().passive_counterpart();
    // 2J = ω_m for the lossy pair
    let r = derive_rates(&passive).unwrap();
    let passive = passive.with_tunneling_ratio(0.5 * r.mech_freq / r.gamma);
    let pth = threshold_power(&passive).unwrap();
    let in_band = (2.3e-6..=21e-6).contains(&pth);
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut last = 0.0;
    for i in 0..20 {
        let delta = 0.95 * i as f64 / 19.0;
        let t = threshold_power(&matched(reference_params().with_gain_loss_ratio(delta))).unwrap();
        monotone &= t < prev;
        prev = t;
        last = t;
    }
    let pass = in_band && monotone && last < 0.1 * pth;
    outcome(
        pass,
        format!(
            "passive P_th = {:.3} uW, 20-point grid monotone = {monotone}, final/passive = {:.2e}",
            pth * 1e6,
            last / pth
        ),
    )
}

/// Eigenvalues of `[[κ, iJ], [iJ, −γ]]` from the quadratic formula.
fn quadratic_oracle(k: f64, g: f64, j: f64) -> [Complex64; 2] {
    let mean = Complex64::new(0.5 * (k - g), 0.0);
    let disc = Complex64::new(0.25 * (k + g) * (k + g) - j * j, 0.0).sqrt();
    [mean + disc, mean - disc]
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst_trace: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut splitting_ok = true;
    for _ in 0..10_000 {
        let omega_c = rng.gen_range(1e13..1e15);
        let gamma = rng.gen_range(1e5..1e8);
        let k = rng.gen_range(-3.0..3.0) * gamma;
        let j = rng.gen_range(0.0..5.0) * gamma;
        let s = spectrum_from_rates(omega_c, k, gamma, j);
        worst_trace = worst_trace.max(rel(s.omega_plus + s.omega_minus, 2.0 * omega_c));
        let sum = s.gamma_plus + s.gamma_minus;
        worst_trace = worst_trace.max((sum - (k - gamma)).abs() / (k - gamma).abs().max(gamma));
        if j < 0.5 * (k + gamma).abs() {
            splitting_ok &= s.splitting == 0.0;
        }
        let ep = 0.5 * (k + gamma).abs();
        if (j - ep).abs() > 1e-3 * gamma {
            // the oracle works in the frame rotating at ω_c
            let s0 = spectrum_from_rates(0.0, k, gamma, j);
            let scale = k.abs().max(gamma).max(j);
            let [a, b] = quadratic_oracle(k, gamma, j);
            let ours = [
                Complex64::new(s0.gamma_plus, s0.omega_plus),
                Complex64::new(s0.gamma_minus, s0.omega_minus),
            ];
            let d1 = (ours[0] - a).norm().max((ours[1] - b).norm());
            let d2 = (ours[0] - b).norm().max((ours[1] - a).norm());
            worst_oracle = worst_oracle.max(d1.min(d2) / scale);
        }
    }
    let pass = worst_trace < 1e-12 && worst_oracle < 1e-10 && splitting_ok;
    outcome(
        pass,
        format!("trace {worst_trace:.1e}, 2x2 oracle {worst_oracle:.1e}, zero splitting below EP = {splitting_ok}"),
    )
}

fn scan_positive_roots(f: impl Fn(f64) -> f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut x0 = 0.0;
    let mut f0 = f(x0);
    for i in 1..=samples {
        let x1 = hi * i as f64 / samples as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count_ok = true;
    for i in 0..10 {
        let delta = 0.2 + 0.2 * i as f64;
        for k in 1..=10 {
            let p = reference_params()
                .with_gain_loss_ratio(delta)
                .with_input_power(3e-6 * k as f64);
            let c = force_balance_cubic(&p).unwrap();
            let hi = 10.0 * (-c.c0 / c.c3).cbrt().min(-c.c0 / c.c1);
            let scan = scan_positive_roots(|x| c.eval(x), hi, 1_000_000);
            let ours = solve_force_balance(&p).unwrap();
            count_ok &= scan.len() == ours.len();
            for (s, x) in ours.iter().zip(&scan) {
                worst = worst.max(rel(s.x_s, *x));
            }
        }
    }
    let mut closed: f64 = 0.0;
    for delta in [0.5, 1.0, 2.0] {
        for power in [1e-8, 1e-6, 1e-3] {
            let mut p = reference_params()
                .with_gain_loss_ratio(delta)
                .with_input_power(power);
            p.tunneling_rate_ratio = delta.sqrt();
            let a = balanced_coupling_solution(&p).unwrap();
            let b = solve_force_balance(&p).unwrap()[0];
            closed = closed.max(rel(a.x_s, b.x_s));
        }
    }
    let pass = count_ok && worst < 1e-6 && closed < 1e-9;
    outcome(
        pass,
        format!("scan deviation {worst:.1e}, closed form deviation {closed:.1e}"),
    )
}

fn rows_for(table: &Table, delta: f64) -> Vec<(f64, f64)> {
    let d = table.column_values("gain_loss_ratio").unwrap();
    let p = table.column_values("input_power").unwrap();
    let n = table.column_values("root_count").unwrap();
    d.iter()
        .zip(p.iter().zip(&n))
        .filter(|(dd, _)| **dd == delta)
        .map(|(_, (pp, nn))| (*pp, *nn))
        .collect()
}

fn criterion_6(s4: &Table) -> Outcome {
    let mut at_15: Vec<(f64, f64)> = rows_for(s4, 1.5);
    at_15.dedup();
    let bistable: Vec<f64> = at_15.iter().filter(|r| r.1 == 3.0).map(|r| r.0).collect();
    let powers: Vec<f64> = at_15.iter().map(|r| r.0).collect();
    let contiguous = !bistable.is_empty() && {
        let first = powers.iter().position(|p| *p == bistable[0]).unwrap();
        bistable
            .iter()
            .enumerate()
            .all(|(i, b)| powers[first + i] == *b)
    };
    let at_1_single = rows_for(s4, 1.0).iter().all(|r| r.1 == 1.0);
    let window = match (bistable.first(), bistable.last()) {
        (Some(a), Some(b)) => format!("[{:.3}, {:.3}] mW", a * 1e3, b * 1e3),
        _ => "none".to_string(),
    };
    outcome(
        contiguous && at_1_single,
        format!("delta=1.5 three roots on {window}, contiguous = {contiguous}; delta=1 single root = {at_1_single}"),
    )
}

fn finite_difference_error(p: &SystemParams) -> f64 {
    let ss = detuned_steady_state(p).unwrap()[0];
    let rates = derive_rates(p).unwrap();
    let jac = build_jacobian(p, &ss).unwrap();
    let y0 = [ss.a1.re, ss.a1.im, ss.a2.re, ss.a2.im, ss.x_s, 0.0];
    let mut scale = [ss.a1.norm().max(ss.a2.norm()); 6];
    scale[4] = ss.x_s.abs().max(rates.x_zpf);
    scale[5] = scale[4] * rates.mech_freq;
    let mut worst: f64 = 0.0;
    for col in 0..6 {
        let h = 1e-4 * scale[col];
        let (mut up, mut down) = (y0, y0);
        up[col] += h;
        down[col] -= h;
        let fu = vector_field(&rates, &up);
        let fd = vector_field(&rates, &down);
        for row in 0..6 {
            let row_scale = (0..6).map(|c| jac[row * 6 + c].abs()).fold(0.0, f64::max);
            let a = jac[row * 6 + col];
            let b = (fu[row] - fd[row]) / (2.0 * h);
            worst = worst.max((a - b).abs() / a.abs().max(1e-9 * row_scale).max(f64::MIN_POSITIVE));
        }
    }
    worst
}

fn criterion_7(s4: &Table) -> Outcome {
    let (agree, total) = stability_agreement(s4).unwrap();
    let f = s4.columns.len() - 1;
    let rh = s4.column_index("rh_stable").unwrap();
    let eig = s4.column_index("eig_stable").unwrap();
    // every disagreement must carry the flag
    let flagged = s4.rows.iter().all(|r| {
        let (
            ptphonon::table::Cell::Int(a),
            ptphonon::table::Cell::Int(b),
            ptphonon::table::Cell::Int(fl),
        ) = (r[rh], r[eig], r[f])
        else {
            return false;
        };
        (a != b) == (fl & flags::STABILITY_DISAGREE != 0)
    });
    let mut rng = StdRng::seed_from_u64(7);
    let mut fd_worst: f64 = 0.0;
    for _ in 0..100 {
        let base = reference_params();
        let p = base
            .with_gain_loss_ratio(rng.gen_range(0.1..2.0))
            .with_tunneling_ratio(rng.gen_range(0.3..3.0))
            .with_detunings(
                rng.gen_range(-0.3..0.3) * base.mech_freq,
                rng.gen_range(-0.3..0.3) * base.mech_freq,
            )
            .with_input_power(rng.gen_range(1e-7..3e-3));
        fd_worst = fd_worst.max(finite_difference_error(&p));
    }
    let rate = agree as f64 / total as f64;
    outcome(
        rate >= 0.9 && flagged && fd_worst < 1e-6,
        format!(
            "verdicts agree on {agree}/{total} = {:.1}% (need 90%), disagreements flagged = {flagged}, Jacobian vs finite differences {fd_worst:.1e}",
            100.0 * rate
        ),
    )
}

fn criterion_8() -> Outcome {
    let base = reference_params();
    let p = base
        .with_gain_loss_ratio(0.5)
        .with_detunings(0.03 * base.mech_freq, 0.03 * base.mech_freq)
        .with_input_power(1e-5);
    let ss = detuned_steady_state(&p).unwrap()[0];
    let stable = eigen_stability(&p, &ss).unwrap().stable;
    let mut start = State::from_steady_state(&ss);
    start.a1 *= Complex64::new(1.001, 0.0005);
    start.a2 *= 0.999;
    start.x *= 1.001;
    let settled = settle(&p, &start, &SettleOptions::default()).unwrap();
    let err = rel(settled.x_s, ss.x_s)
        .max(rel(settled.photon_number_passive, ss.photon_number_passive))
        .max((settled.a1 - ss.a1).norm() / ss.a1.norm())
        .max((settled.a2 - ss.a2).norm() / ss.a2.norm());

    let q = reference_params().with_input_power(0.0);
    let r = derive_rates(&q).unwrap();
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
    let traj = integrate(&q, &initial, 400.0 * period, &opts).unwrap();
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| (*t, (s.x * s.x + (s.v / r.mech_freq).powi(2)).sqrt().ln()))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let decay = -num / den;
    let decay_err = rel(decay, 0.5 * r.mech_damping);
    outcome(
        stable && err < 1e-6 && decay_err < 0.01,
        format!("settle error {err:.1e}, ringdown rate relative error {decay_err:.1e}"),
    )
}

fn criterion_9(fig3: &Table) -> Outcome {
    let mut exact: f64 = 0.0;
    let mut zero: f64 = 0.0;
    let deltas = [-1.0, 0.5, 0.9, 0.99];
    let mut thresholds = Vec::new();
    for delta in deltas {
        let mut p = reference_params().with_gain_loss_ratio(delta);
        if delta < 0.0 {
            p = p.passive_counterpart();
        }
        let r = derive_rates(&p).unwrap();
        let p = p.with_tunneling_ratio(0.5 * r.mech_freq / r.gamma);
        let pth = threshold_power(&p).unwrap();
        exact = exact.max((phonon_number(&p.with_input_power(pth)).unwrap().value - 1.0).abs());
        zero = zero.max(rel(
            phonon_number(&p.with_input_power(0.0)).unwrap().value,
            (-2.0f64).exp(),
        ));
        thresholds.push(pth);
    }
    // the preset's threshold column must reproduce the same crossings
    let d = fig3.column_values("gain_loss_ratio").unwrap();
    let t = fig3.column_values("threshold_power").unwrap();
    let table_ok = deltas.iter().zip(&thresholds).all(|(delta, want)| {
        d.iter()
            .zip(&t)
            .filter(|(dd, _)| *dd == delta)
            .all(|(_, tt)| rel(*tt, *want) < 1e-12)
    });
    let decreasing = thresholds.windows(2).all(|w| w[1] < w[0]);
    outcome(
        exact < 1e-9 && zero < 1e-12 && decreasing && table_ok,
        format!(
            "|n(P_th) - 1| = {exact:.1e}, n(0) error {zero:.1e}, crossings (uW) {:?}",
            thresholds
                .iter()
                .map(|v| (v * 1e9).round() / 1e3)
                .collect::<Vec<_>>()
        ),
    )
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ptphonon");
    let run = || {
        Command::new(bin)
            .args(["--quiet", "figure", "fig2a"])
            .output()
            .expect("run ptphonon")
    };
    let (a, b) = (run(), run());
    let da = split_csv(&String::from_utf8_lossy(&a.stdout)).1;
    let db = split_csv(&String::from_utf8_lossy(&b.stdout)).1;
    let identical = a.status.success() && b.status.success() && !da.is_empty() && da == db;

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "[params]\ninput_power = 1e-6\n\nmech_mas = 5e-11\n").unwrap();
    let bad = Command::new(bin).arg("run").arg(&path).output().unwrap();
    let stderr = String::from_utf8_lossy(&bad.stderr);
    let code = bad.status.code();
    let named = stderr.contains("line 4") && stderr.contains("mech_mas");
    outcome(
        identical && code == Some(2) && named,
        format!("fig2a data sections identical = {identical}; bad config exit {code:?}, names line 4 = {named}"),
    )
}

fn main() {
    let s4 = figure_preset(Preset::S4).expect("s4 preset");
    let fig3 = figure_preset(Preset::Fig3).expect("fig3 preset");
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "amplification factor", criterion_1()),
        (2, "relative amplification", criterion_2()),
        (3, "phonon-laser threshold", criterion_3()),
        (4, "supermode algebra", criterion_4()),
        (5, "cubic solver oracles", criterion_5()),
        (6, "bistability map", criterion_6(&s4)),
        (7, "stability cross-validation", criterion_7(&s4)),
        (8, "dynamics consistency", criterion_8()),
        (9, "phonon-number curve", criterion_9(&fig3)),
        (10, "CLI determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {tag} {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
