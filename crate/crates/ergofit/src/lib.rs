//! Batch command line and `/v1` HTTP service over `ergofit-core`.

use std::path::{Path, PathBuf};

pub mod cli;
pub mod report;
pub mod service;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad arguments or inputs the user can fix; exit code 2.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ergofit_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Runtime(String),
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            _ => 1,
        }
    }
}
