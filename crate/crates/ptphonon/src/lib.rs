//! Scenario files, parameter sweeps, figure presets and CSV output for
//! `ptphonon-core`.

pub mod cli;
pub mod config;
pub mod eval;
pub mod presets;
pub mod table;

pub use config::{parse_scenario, ConfigError, Scenario};
pub use eval::run_scenario;
pub use presets::{figure_preset, Preset};
pub use table::Table;
