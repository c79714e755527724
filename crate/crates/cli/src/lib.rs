//! Config-driven front end for the `seqrisk` library.
//!
//! A run parses an [`ExperimentConfig`], executes it entirely in memory and
//! only then writes its output directory:
//!
//! - `summary.json`: command, seed, resolved config and result. Identical
//!   config and seed give byte-identical summaries.
//! - `metadata.json`: wall-clock timestamp, version and thread count.
//! - `records.csv` (experiments and bound sweeps):
//!   `replication,seed,statistic,bound,holds`, plus `sweep` for sweeps.
//! - `sequence.csv` (simulate): `index,x0,...,x{d-1},y`.
//!
//! Exit codes: 0 success, 2 invalid config, 3 acceptance property failed,
//! 4 I/O failure.

pub mod config;
pub mod output;
pub mod plot;
pub mod run;

pub use config::ExperimentConfig;
pub use run::{execute, Outcome};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] seqrisk::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed records: {0}")]
    Records(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Library(_) | CliError::Records(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}

pub const EXIT_PROPERTY_FAILED: u8 = 3;
