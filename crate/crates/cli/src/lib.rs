//! Config-driven experiment runner for `entperc-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind, Violation};
pub use error::CliError;
pub use run::{run, RunSummary};
