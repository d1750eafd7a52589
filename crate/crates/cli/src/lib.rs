//! Batch harness behind the `eprsim` binary: load a [`RunConfig`], run the
//! named experiment, write JSON/CSV artifacts.
//!
//! Exit codes: `0` success, `2` configuration or input error, `3` failed
//! physical invariant (rejected covariance, gate distance over tolerance, …).

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Experiment, Format, RunConfig};
pub use experiments::{execute, Report};
pub use output::write_outputs;

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),

    /// Parse or lowering diagnostics of a `.seq` program, already rendered.
    #[error("{0}")]
    Source(String),

    #[error(transparent)]
    Core(#[from] eprsim_core::Error),

    #[error("physics check failed: {0}")]
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Physics(_) => 3,
            CliError::Core(e) if e.is_physics_failure() => 3,
            _ => 2,
        }
    }
}

/// Runs `cfg`, writes its artifacts and returns the report. A failed physics
/// check still writes artifacts before surfacing as [`CliError::Physics`].
pub fn run(cfg: &RunConfig, workers: usize) -> Result<(Report, Vec<PathBuf>), CliError> {
    let report = execute(cfg, workers)?;
    let written = write_outputs(cfg, &report)?;
    Ok((report, written))
}
