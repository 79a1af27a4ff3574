use std::path::PathBuf;

use graphstate::{ClaimError, EntanglementError, GraphError, StateError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("reading stdin: {0}")]
    Stdin(std::io::Error),
    #[error("invalid graph input: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid state input: {0}")]
    State(#[from] StateError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Claim(#[from] ClaimError),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 3 for bad input or arguments, 4 for file-system failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Stdin(_) | CliError::Csv(_) => 4,
            _ => 3,
        }
    }
}
