//! Figure datasets. Ranges not fixed by the model are choices of this tool
//! and are listed in the README.

use ptphonon_core::PolynomialForm;

use crate::config::{Axis, CouplingSpec, Quantity, Scenario};
use crate::eval::{run_scenario, EvalError};
use crate::table::{flags, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3,
    S1,
    S2,
    S3,
    S4,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3,
        Preset::S1,
        Preset::S2,
        Preset::S3,
        Preset::S4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3 => "fig3",
            Preset::S1 => "s1",
            Preset::S2 => "s2",
            Preset::S3 => "s3",
            Preset::S4 => "s4",
        }
    }

    pub fn scenario(self) -> Scenario {
        let base = Scenario::default();
        let wm = base.params.mech_freq;
        match self {
            // δ = −1 is the lossy pair; at δ = 1 a √(2γ) port equals √(2κ)
            Preset::Fig2a => Scenario {
                coupling: CouplingSpec::Loss,
                axes: vec![
                    Axis::list("gain_loss_ratio", &[-1.0, 1.0]),
                    Axis::linear("input_power", 0.0, 30e-6, 61),
                ],
                quantities: vec![
                    Quantity::PhotonNumber,
                    Quantity::Displacement,
                    Quantity::Eta,
                ],
                ..base
            },
            Preset::Fig2b => Scenario {
                axes: vec![
                    Axis::linear("gain_loss_ratio", 0.5, 3.0, 26),
                    Axis::linear("input_power", 1e-6, 30e-6, 30),
                ],
                quantities: vec![Quantity::Eta, Quantity::PhotonNumber],
                ..base
            },
            Preset::Fig3 => Scenario {
                tunneling_rate: Some(0.5 * wm),
                coupling: CouplingSpec::Loss,
                axes: vec![
                    Axis::list("gain_loss_ratio", &[-1.0, 0.5, 0.9, 0.99]),
                    Axis::linear("input_power", 0.0, 30e-6, 61),
                ],
                quantities: vec![
                    Quantity::PhononNumber,
                    Quantity::Gain,
                    Quantity::ThresholdPower,
                ],
                ..base
            },
            Preset::S1 => Scenario {
                axes: vec![Axis::linear("tunneling_rate_ratio", 0.0, 3.0, 61)],
                quantities: vec![Quantity::Eta, Quantity::PhotonNumber],
                ..base
            },
            Preset::S2 => Scenario {
                axes: vec![
                    Axis::linear("gain_loss_ratio", 0.5, 3.0, 26),
                    Axis::linear("input_power", 1e-6, 30e-6, 30),
                ],
                quantities: vec![Quantity::Xi],
                ..base
            },
            Preset::S3 => Scenario {
                coupling: CouplingSpec::Loss,
                axes: vec![
                    Axis::list("gain_loss_ratio", &[-1.0, 1.0]),
                    Axis::linear("tunneling_rate_ratio", 0.0, 3.0, 301),
                ],
                quantities: vec![Quantity::Splitting, Quantity::Linewidths],
                ..base
            },
            Preset::S4 => Scenario {
                params: base.params.with_detunings(0.03 * wm, 0.15 * wm),
                form: PolynomialForm::AsPrinted,
                axes: vec![
                    Axis::list("gain_loss_ratio", &[0.5, 1.0, 1.5]),
                    Axis::linear("input_power", 0.0, 2e-3, 401),
                ],
                quantities: vec![
                    Quantity::PhotonNumber,
                    Quantity::Displacement,
                    Quantity::RootCount,
                    Quantity::S1,
                    Quantity::S2,
                    Quantity::MaxRealPart,
                    Quantity::Stable,
                ],
                ..base
            },
        }
    }
}

/// Number of rows whose stability verdicts agree, out of all rows that
/// carry both verdicts.
pub fn stability_agreement(table: &Table) -> Option<(usize, usize)> {
    let rh = table.column_index("rh_stable")?;
    let eig = table.column_index("eig_stable")?;
    let f = table.columns.len() - 1;
    let mut agree = 0;
    let mut total = 0;
    for r in &table.rows {
        if let (Cell::Int(a), Cell::Int(b), Cell::Int(fl)) = (r[rh], r[eig], r[f]) {
            if a < 0 || b < 0 {
                continue;
            }
            total += 1;
            if fl & flags::STABILITY_DISAGREE == 0 {
                agree += 1;
            }
        }
    }
    Some((agree, total))
}

pub fn figure_preset(preset: Preset) -> Result<Table, EvalError> {
    let mut table = run_scenario(&preset.scenario())?;
    table
        .metadata
        .insert(0, ("preset".into(), preset.name().into()));
    if let Some((agree, total)) = stability_agreement(&table) {
        table
            .metadata
            .push(("stability_agreement".into(), format!("{agree}/{total}")));
    }
    Ok(table)
}
