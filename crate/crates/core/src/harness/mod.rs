//! Experiment orchestration: configs, seeded replica fan-out, CSV and
//! manifest outputs, and the `verify` suite.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod runner;
pub mod verify;

pub use commands::{cmd_bootstrap, cmd_couple, cmd_droplet, cmd_generous, cmd_tau, CommandReport};
pub use config::{config_hash, load_file, load_str, ExperimentConfig};
pub use manifest::{RunManifest, RunRecord, RunStatus};
pub use runner::RunOptions;
pub use verify::{cmd_verify, CriterionResult, VerifyConfig, VerifyReport};

use std::io;

use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::bootstrap::BootstrapError;
use crate::kinetics::KineticsError;
use crate::lattice::LatticeError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Kinetics(KineticsError::Budget { .. }) => EXIT_BUDGET,
            HarnessError::Analytics(_) => EXIT_PROPERTY,
            _ => EXIT_CONFIG,
        }
    }
}
