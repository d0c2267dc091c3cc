use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("relative difference is undefined for a best-known value of 0")]
    ZeroReference,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("instance sets differ: {0}")]
    InstanceMismatch(String),
    #[error("no rows for reference solver '{0}'")]
    NoReference(String),
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] isingbench_core::IsingError),
    #[error(transparent)]
    Solver(#[from] isingbench_solvers::SolverError),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}

pub(crate) fn csv_err(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> HarnessError {
    let path = path.into();
    move |e| HarnessError::Format {
        path,
        message: e.to_string(),
    }
}
