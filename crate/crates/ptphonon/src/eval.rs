//! Evaluation of a [`Scenario`] into a [`Table`], one grid point per rayon task.

use rayon::prelude::*;
use thiserror::Error;

use ptphonon_core::linear_response::{
    detuned_steady_states_with, stability_report, StabilityReport,
};
use ptphonon_core::math::TAU;
use ptphonon_core::steady_state::{
    eta_for_state, relative_xi_for_state, solve_force_balance, PASSIVE_THRESHOLD_REFERENCE,
};
use ptphonon_core::supermodes::{
    gain_at_power, phonon_number, supermode_spectrum, threshold_power,
};
use ptphonon_core::{ModelError, OpticalConvention, PolynomialForm, SteadyState, SystemParams};

use crate::config::{get_field, Quantity, Scale, Scenario, PARAM_FIELDS};
use crate::table::{flags, format_float, Cell, Column, Table};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid parameters at grid point {point:?}: {source}")]
    InvalidParams { point: Vec<f64>, source: ModelError },
}

fn undefined(flag: &mut i64) -> Cell {
    *flag |= flags::UNDEFINED;
    Cell::Float(f64::NAN)
}

fn float_or_nan(r: Result<f64, impl Sized>, flag: &mut i64) -> Cell {
    match r {
        Ok(v) => Cell::Float(v),
        Err(_) => undefined(flag),
    }
}

/// Steady states at one point: the zero-detuning cubic when both
/// detunings vanish, the detuned polynomial otherwise.
pub fn steady_states(
    p: &SystemParams,
    form: PolynomialForm,
) -> Result<Vec<SteadyState>, ModelError> {
    if p.has_detuning() {
        detuned_steady_states_with(p, form)
    } else {
        solve_force_balance(p)
    }
}

pub fn columns(scenario: &Scenario) -> Vec<Column> {
    let mut cols: Vec<Column> = scenario
        .axes
        .iter()
        .map(|a| Column::new(a.field, unit_of(a.field)))
        .collect();
    if scenario.quantities.iter().any(|q| q.per_state()) {
        cols.push(Column::new("branch", "1"));
    }
    for q in &scenario.quantities {
        cols.extend(q.columns().iter().map(|(n, u)| Column::new(n, u)));
    }
    cols.push(Column::new("flags", "1"));
    cols
}

pub fn unit_of(field: &str) -> &'static str {
    match field {
        "wavelength" | "radius" => "m",
        "mech_freq" | "detuning_1" | "detuning_2" => "rad/s",
        "mech_damping" => "1/s",
        "mech_mass" => "kg",
        "input_power" => "W",
        _ => "1",
    }
}

fn point_rows(scenario: &Scenario, point: &[f64]) -> Result<Vec<Vec<Cell>>, EvalError> {
    let p = scenario.resolve(point);
    p.validate().map_err(|source| EvalError::InvalidParams {
        point: point.to_vec(),
        source,
    })?;
    let qs = &scenario.quantities;
    let wants_states = qs.iter().any(|q| q.per_state());
    let wants_stability = qs.iter().any(|q| {
        matches!(
            q,
            Quantity::S1 | Quantity::S2 | Quantity::MaxRealPart | Quantity::Stable
        )
    });

    let spectrum = supermode_spectrum(&p);
    let states: Result<Vec<SteadyState>, ModelError> = if wants_states {
        steady_states(&p, scenario.form)
    } else {
        Ok(vec![SteadyState::zero()])
    };
    let (states, branch_codes): (Vec<Option<SteadyState>>, Vec<i64>) = match &states {
        Ok(v) if !v.is_empty() => (
            v.iter().copied().map(Some).collect(),
            v.iter().map(|s| i64::from(s.branch.code())).collect(),
        ),
        _ => (vec![None], vec![-1]),
    };
    let root_count = states.iter().filter(|s| s.is_some()).count();

    let mut rows = Vec::with_capacity(states.len());
    for (state, code) in states.iter().zip(branch_codes) {
        let mut flag = 0i64;
        let mut row: Vec<Cell> = point.iter().map(|v| Cell::Float(*v)).collect();
        if wants_states {
            if state.is_none() {
                flag |= flags::UNDEFINED;
            }
            row.push(Cell::Int(code));
        }
        let report: Option<StabilityReport> = match state {
            Some(s) if wants_stability => stability_report(&p, s, root_count).ok(),
            _ => None,
        };
        if wants_stability {
            match &report {
                Some(r) if !r.agrees() => flag |= flags::STABILITY_DISAGREE,
                Some(_) => {}
                None => flag |= flags::UNDEFINED,
            }
        }
        for q in qs {
            match q {
                Quantity::PhotonNumber => row.push(match state {
                    Some(s) => Cell::Float(s.photon_number_passive),
                    None => undefined(&mut flag),
                }),
                Quantity::Displacement => row.push(match state {
                    Some(s) => Cell::Float(s.x_s),
                    None => undefined(&mut flag),
                }),
                Quantity::Eta => row.push(match state {
                    Some(s) => float_or_nan(eta_for_state(&p, s), &mut flag),
                    None => undefined(&mut flag),
                }),
                Quantity::Xi => row.push(match state {
                    Some(s) => float_or_nan(
                        relative_xi_for_state(&p, s, PASSIVE_THRESHOLD_REFERENCE),
                        &mut flag,
                    ),
                    None => undefined(&mut flag),
                }),
                Quantity::Splitting => row.push(float_or_nan(
                    spectrum.as_ref().map(|s| s.splitting / TAU),
                    &mut flag,
                )),
                Quantity::Linewidths => {
                    row.push(float_or_nan(
                        spectrum.as_ref().map(|s| s.gamma_plus),
                        &mut flag,
                    ));
                    row.push(float_or_nan(
                        spectrum.as_ref().map(|s| s.gamma_minus),
                        &mut flag,
                    ));
                }
                Quantity::Gain => row.push(float_or_nan(gain_at_power(&p), &mut flag)),
                Quantity::ThresholdPower => row.push(float_or_nan(threshold_power(&p), &mut flag)),
                Quantity::PhononNumber => row.push(match phonon_number(&p) {
                    Ok(n) => {
                        if n.saturated {
                            flag |= flags::SATURATED;
                        }
                        Cell::Float(n.value)
                    }
                    Err(_) => undefined(&mut flag),
                }),
                Quantity::S1 => row.push(match &report {
                    Some(r) => Cell::Float(r.s1),
                    None => undefined(&mut flag),
                }),
                Quantity::S2 => row.push(match &report {
                    Some(r) => Cell::Float(r.s2),
                    None => undefined(&mut flag),
                }),
                Quantity::MaxRealPart => row.push(match &report {
                    Some(r) => Cell::Float(r.max_real_part),
                    None => undefined(&mut flag),
                }),
                Quantity::RootCount => row.push(Cell::Int(root_count as i64)),
                Quantity::Stable => match &report {
                    Some(r) => {
                        row.push(Cell::Int(i64::from(r.rh_stable)));
                        row.push(Cell::Int(i64::from(r.eig_stable)));
                    }
                    None => {
                        row.push(Cell::Int(-1));
                        row.push(Cell::Int(-1));
                    }
                },
            }
        }
        if row
            .iter()
            .any(|c| matches!(c, Cell::Float(v) if !v.is_finite()))
        {
            flag |= flags::NON_FINITE;
        }
        row.push(Cell::Int(flag));
        rows.push(row);
    }
    Ok(rows)
}

/// Metadata describing the resolved scenario.
pub fn metadata(scenario: &Scenario) -> Vec<(String, String)> {
    let p = &scenario.params;
    let mut m = vec![
        (
            "convention".to_string(),
            match p.convention {
                OpticalConvention::Cyclic => "cyclic (omega_c = c/lambda)".to_string(),
                OpticalConvention::Angular => "angular (omega_c = 2 pi c/lambda)".to_string(),
            },
        ),
        (
            "units".to_string(),
            "SI; rates in rad/s or 1/s; columns marked Hz are angular values divided by 2 pi"
                .to_string(),
        ),
        (
            "polynomial".to_string(),
            match scenario.form {
                PolynomialForm::AsPrinted => "printed".to_string(),
                PolynomialForm::SelfConsistent => "consistent".to_string(),
            },
        ),
        ("input_coupling".to_string(), scenario.coupling.token()),
    ];
    for f in PARAM_FIELDS {
        let swept = scenario.axes.iter().any(|a| a.field == f);
        let overridden = f == "tunneling_rate_ratio" && scenario.tunneling_rate.is_some();
        if !swept && !overridden {
            m.push((format!("param_{f}"), format_float(get_field(p, f).unwrap())));
        }
    }
    if let Some(j) = scenario.tunneling_rate {
        m.push(("param_tunneling_rate".to_string(), format_float(j)));
    }
    for (i, a) in scenario.axes.iter().enumerate() {
        let spec = match a.scale {
            Scale::List => {
                let vals: Vec<String> = a.values.iter().map(|v| format_float(*v)).collect();
                format!("{} list {}", a.field, vals.join(" "))
            }
            _ => format!(
                "{} {} {} {} {}",
                a.field,
                a.scale.token(),
                format_float(a.values[0]),
                format_float(a.values[a.values.len() - 1]),
                a.values.len()
            ),
        };
        m.push((format!("axis_{}", i + 1), spec));
    }
    m
}

/// Evaluates every grid point in parallel and assembles the rows in grid order.
pub fn run_scenario(scenario: &Scenario) -> Result<Table, EvalError> {
    let grid = scenario.grid();
    let blocks = grid
        .par_iter()
        .map(|pt| point_rows(scenario, pt))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(columns(scenario));
    table.metadata = metadata(scenario);
    table.rows = blocks.into_iter().flatten().collect();
    Ok(table)
}
