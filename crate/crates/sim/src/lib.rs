//! Parallel drivers, noise spectra, run configuration, CSV output and the
//! scenario runner behind the `rabi` binary.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod parallel;
pub mod presets;
pub mod runner;
pub mod spectrum;

pub use config::{parse_config, Plan, RunConfig, Scenario, Solver};
pub use error::{ConfigError, Result, SimError};
pub use manifest::Manifest;
pub use runner::{run_scenario, RunReport};
