use std::path::PathBuf;

use thiserror::Error;

/// Failures of a harness run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Numeric(#[from] contraction_core::Error),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn usage(msg: impl Into<String>) -> Self {
        LabError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 2,
            LabError::Numeric(_) => 3,
            LabError::Io { .. } => 4,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
