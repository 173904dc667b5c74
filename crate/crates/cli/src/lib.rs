//! Scenario files, run artifacts and sweeps for the `pipestab` binary.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{OutputPaths, ScenarioConfig};
pub use output::ReportSummary;
