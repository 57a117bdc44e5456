//! Command-line experiment runner for `fockflux`: JSON configuration, seeded
//! suites for every acceptance check, CSV tables and a run manifest.

pub mod config;
pub mod error;
pub mod random;
pub mod report;
pub mod run;
pub mod suites;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use run::{run, Outcome};
