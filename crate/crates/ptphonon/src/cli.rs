use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ptphonon_core::dynamics::{
    integrate, IntegrateOptions, IntegrationError, State, Terminal, Tolerances,
};
use ptphonon_core::ModelError;

use crate::config::{
    apply_overrides, parse_axis_arg, parse_scenario, Axis, ConfigError, Quantity, Scenario,
};
use crate::eval::{run_scenario, steady_states, EvalError};
use crate::presets::{figure_preset, stability_agreement, Preset};
use crate::table::{flags, Cell, Column, Table};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ptphonon",
    version,
    about = "Steady states, supermodes, phonon lasing and stability of a gain/loss coupled resonator pair"
)]
pub struct Cli {
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Suppress diagnostics on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Omit the timestamp metadata line.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Args, Default)]
pub struct ScenarioArgs {
    /// Scenario file; its [outputs] section is ignored by the fixed-output subcommands.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter override, `key=value` with [params] keys. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Sweep axis `"<field> <start> <stop> <count> <linear|log>"`. Repeatable, at most 2.
    #[arg(long = "axis", value_name = "SPEC")]
    pub axis: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Start {
    /// Empty resonators at rest.
    Zero,
    /// The lowest steady state, scaled by `1 + perturb`.
    Steady,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Photon number, displacement, η, ξ and root count.
    SteadyState(ScenarioArgs),
    /// Supermode splitting and linewidths.
    Supermodes(ScenarioArgs),
    /// Lasing threshold and mechanical gain.
    Threshold(ScenarioArgs),
    /// Stimulated phonon number and gain.
    PhononNumber(ScenarioArgs),
    /// Routh–Hurwitz and eigenvalue stability of every branch.
    StabilityMap(ScenarioArgs),
    /// Time-domain trajectory.
    Dynamics {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Integration time (s).
        #[arg(long, default_value_t = 1e-5)]
        t_max: f64,
        /// Sampling interval (s); default t_max/1000.
        #[arg(long)]
        sample: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-9)]
        atol: f64,
        #[arg(long, value_enum, default_value_t = Start::Zero)]
        start: Start,
        /// Relative perturbation applied to the steady start.
        #[arg(long, default_value_t = 1e-3)]
        perturb: f64,
    },
    /// Predefined figure dataset.
    Figure {
        #[arg(value_enum)]
        preset: Preset,
    },
    /// Evaluate a scenario file.
    Run { config: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("invalid parameters: {0}")]
    Model(#[from] ModelError),
    #[error("invalid option: {0}")]
    Option(String),
    #[error("integration failed: {0}")]
    Integration(IntegrationError),
    #[error("output: {0}")]
    Write(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Eval(_) | CliError::Model(_) | CliError::Option(_) => {
                EXIT_CONFIG
            }
            CliError::Integration(
                IntegrationError::InvalidInput(_) | IntegrationError::Model(_),
            ) => EXIT_CONFIG,
            CliError::Integration(_) => EXIT_NUMERICAL,
            CliError::Write(e) if e.kind() == io::ErrorKind::InvalidData => EXIT_NUMERICAL,
            CliError::Read { .. } | CliError::Write(_) => EXIT_IO,
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn load(args: &ScenarioArgs, quantities: &[Quantity]) -> Result<Scenario, CliError> {
    let mut s = match &args.config {
        Some(path) => parse_scenario(&read(path)?, &path.display().to_string())?,
        None => Scenario::default(),
    };
    apply_overrides(&mut s, &args.set)?;
    if !args.axis.is_empty() {
        let axes = args
            .axis
            .iter()
            .enumerate()
            .map(|(i, a)| parse_axis_arg(a, i))
            .collect::<Result<Vec<Axis>, _>>()?;
        if axes.len() > 2 {
            return Err(CliError::Option("at most 2 sweep axes".into()));
        }
        if axes.len() == 2 && axes[0].field == axes[1].field {
            return Err(CliError::Option(format!(
                "axis `{}` swept twice",
                axes[0].field
            )));
        }
        s.axes = axes;
    }
    if s.tunneling_rate.is_some() && s.axes.iter().any(|a| a.field == "tunneling_rate_ratio") {
        return Err(CliError::Option(
            "`tunneling_rate` cannot be combined with a `tunneling_rate_ratio` axis".into(),
        ));
    }
    s.quantities = quantities.to_vec();
    Ok(s)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn dynamics_table(
    scenario: &Scenario,
    t_max: f64,
    sample: Option<f64>,
    tolerances: Tolerances,
    start: Start,
    perturb: f64,
) -> Result<Table, CliError> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Option(format!(
            "--t-max must be positive, got {t_max}"
        )));
    }
    if !scenario.axes.is_empty() {
        return Err(CliError::Option("dynamics does not take sweep axes".into()));
    }
    let p = scenario.resolve(&[]);
    p.validate()?;
    let initial = match start {
        Start::Zero => State::zero(),
        Start::Steady => {
            let states = steady_states(&p, scenario.form)?;
            let ss = states
                .first()
                .ok_or_else(|| CliError::Option("no steady state to start from".into()))?;
            let mut s = State::from_steady_state(ss);
            s.a1 *= 1.0 + perturb;
            s.a2 *= 1.0 + perturb;
            s.x *= 1.0 + perturb;
            s
        }
    };
    let opts = IntegrateOptions {
        tolerances,
        sample_interval: Some(sample.unwrap_or(t_max / 1000.0)),
        ..IntegrateOptions::default()
    };
    let traj = integrate(&p, &initial, t_max, &opts).map_err(CliError::Integration)?;
    let mut table = Table::new(
        [
            ("time", "s"),
            ("a1_re", "1"),
            ("a1_im", "1"),
            ("a2_re", "1"),
            ("a2_im", "1"),
            ("x", "m"),
            ("v", "m/s"),
            ("flags", "1"),
        ]
        .iter()
        .map(|(n, u)| Column::new(n, u))
        .collect(),
    );
    table.metadata = crate::eval::metadata(scenario);
    let terminal = match traj.terminal {
        Terminal::Converged => "converged",
        Terminal::MaxTimeReached => "max_time_reached",
        Terminal::Diverged => "diverged",
    };
    table.metadata.push(("terminal".into(), terminal.into()));
    table.metadata.push((
        "steps".into(),
        format!(
            "{} accepted, {} rejected",
            traj.accepted_steps, traj.rejected_steps
        ),
    ));
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let vals = [*t, s.a1.re, s.a1.im, s.a2.re, s.a2.im, s.x, s.v];
        let mut row: Vec<Cell> = vals.iter().map(|v| Cell::Float(*v)).collect();
        let f = if vals.iter().all(|v| v.is_finite()) {
            0
        } else {
            flags::NON_FINITE
        };
        row.push(Cell::Int(f));
        table.rows.push(row);
    }
    Ok(table)
}

fn stability_defaults(args: &ScenarioArgs) -> ScenarioArgs {
    // with nothing specified, reproduce the bistability grid
    if args.config.is_none() && args.set.is_empty() && args.axis.is_empty() {
        let s4 = Preset::S4.scenario();
        let wm = s4.params.mech_freq;
        ScenarioArgs {
            config: None,
            set: vec![
                format!("detuning_1={}", 0.03 * wm),
                format!("detuning_2={}", 0.15 * wm),
            ],
            axis: vec![
                "gain_loss_ratio 0.5 1.5 3 linear".into(),
                "input_power 0 2e-3 401 linear".into(),
            ],
        }
    } else {
        ScenarioArgs {
            config: args.config.clone(),
            set: args.set.clone(),
            axis: args.axis.clone(),
        }
    }
}

fn build(cli: &Cli) -> Result<(Table, String), CliError> {
    use Quantity::*;
    let (label, table) = match &cli.command {
        Command::SteadyState(a) => (
            "steady-state",
            run_scenario(&load(a, &[PhotonNumber, Displacement, Eta, Xi, RootCount])?)?,
        ),
        Command::Supermodes(a) => (
            "supermodes",
            run_scenario(&load(a, &[Splitting, Linewidths])?)?,
        ),
        Command::Threshold(a) => (
            "threshold",
            run_scenario(&load(a, &[ThresholdPower, Gain])?)?,
        ),
        Command::PhononNumber(a) => (
            "phonon-number",
            run_scenario(&load(a, &[PhononNumber, Gain])?)?,
        ),
        Command::StabilityMap(a) => {
            let args = stability_defaults(a);
            let mut t = run_scenario(&load(
                &args,
                &[PhotonNumber, RootCount, S1, S2, MaxRealPart, Stable],
            )?)?;
            if let Some((agree, total)) = stability_agreement(&t) {
                t.metadata
                    .push(("stability_agreement".into(), format!("{agree}/{total}")));
            }
            ("stability-map", t)
        }
        Command::Dynamics {
            scenario,
            t_max,
            sample,
            rtol,
            atol,
            start,
            perturb,
        } => {
            let s = load(scenario, &[])?;
            let tol = Tolerances {
                rtol: *rtol,
                atol: *atol,
            };
            (
                "dynamics",
                dynamics_table(&s, *t_max, *sample, tol, *start, *perturb)?,
            )
        }
        Command::Figure { preset } => ("figure", figure_preset(*preset)?),
        Command::Run { config } => {
            let text = read(config)?;
            let s = parse_scenario(&text, &config.display().to_string())?;
            ("run", run_scenario(&s)?)
        }
    };
    Ok((table, label.to_string()))
}

fn summary(table: &Table) -> String {
    let f = table.columns.len() - 1;
    let count = |bit: i64| {
        table
            .rows
            .iter()
            .filter(|r| matches!(r[f], Cell::Int(v) if v & bit != 0))
            .count()
    };
    format!(
        "{} rows; {} with undefined values, {} with non-finite values, {} with stability disagreement",
        table.rows.len(),
        count(flags::UNDEFINED),
        count(flags::NON_FINITE),
        count(flags::STABILITY_DISAGREE)
    )
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let (mut table, label) = build(cli)?;
    table.metadata.insert(0, ("command".into(), label));
    let timestamp = (!cli.no_timestamp).then(unix_now);
    let mut buf = Vec::new();
    table
        .write_csv(&mut buf, timestamp)
        .map_err(CliError::Write)?;
    match &cli.out {
        Some(path) => fs::write(path, &buf).map_err(CliError::Write)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&buf)
                .and_then(|_| out.flush())
                .map_err(CliError::Write)?;
        }
    }
    if !cli.quiet {
        eprintln!("ptphonon: {}", summary(&table));
    }
    Ok(())
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("ptphonon: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
