//! Scenario configs, result files and the `atomkernel` command line on top
//! of [`atomkernel_core`].
//!
//! A scenario names a kernel space, a measurement family, a ground truth and
//! noise/contamination levels. The `certify`, `recover` and `stability`
//! pipelines turn scenarios into `results.json`, `results.csv` and
//! `run-manifest.json`.

#![deny(unsafe_code)]
#![warn(missing_docs)]

pub mod config;
pub mod dto;
pub mod pipeline;
pub mod run;
pub mod sweep;

pub use config::{Pipeline, ScenarioConfig};
pub use pipeline::{run_scenario, Row, ScenarioOutcome};
pub use run::{run, run_config, Command, RunOptions, RunSummary};
pub use sweep::sweep_expand;

/// Errors of the driver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Config file does not parse or fails the schema checks.
    #[error("{message}")]
    Config {
        /// Line of the offending entry, when known.
        line: Option<usize>,
        /// Diagnostic.
        message: String,
    },
    /// File system failure.
    #[error("io: {0}")]
    Io(String),
    /// Error raised by the core library.
    #[error(transparent)]
    Core(#[from] atomkernel_core::Error),
    /// Scenario cannot be set up.
    #[error("{0}")]
    Scenario(String),
}
