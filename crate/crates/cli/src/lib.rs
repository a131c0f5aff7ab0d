//! Configuration, orchestration and CSV export around `stringopt-core`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod check;
pub mod config;
pub mod csv_io;
pub mod pipeline;

use std::path::PathBuf;

pub use config::{parse_config, Artifact, ConfigError, RunConfig};
pub use csv_io::CsvError;
pub use pipeline::{run_pipeline, PipelineOutcome, Scenario, Summary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(#[from] stringopt_core::Error),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} self-check(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use stringopt_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(E::InvalidParams(_) | E::InvalidMesh(_) | E::UnsupportedOrder(_)) => 2,
            CliError::Solver(_) => 3,
            CliError::Csv(_) | CliError::Io { .. } => 4,
            CliError::CheckFailed(_) => 1,
        }
    }
}

/// Reads and validates a config file; `None` gives the reference scenario.
pub fn load_config(path: Option<&std::path::Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(parse_config(&text)?)
        }
    }
}
