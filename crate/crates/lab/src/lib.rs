//! Experiment runner for framelet graph dynamics: strict JSON configs, trace
//! CSVs, summaries, energy reports and parallel parameter sweeps.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod report;
pub mod sweep;

pub use config::{ExperimentConfig, SweepParameter};
pub use error::{LabError, Result};
pub use experiment::{run_config, Experiment, RunOutcome, Summary};
pub use report::{energy_report, EnergyReport};
pub use sweep::{format_sweep, run_sweep, SweepRow};
