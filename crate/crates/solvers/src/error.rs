use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid annealing schedule: {0}")]
    Schedule(String),
    #[error("invalid inverse-temperature ladder: {0}")]
    Ladder(String),
    #[error(transparent)]
    Model(#[from] isingbench_core::IsingError),
    #[error("cannot access {path}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = SolverError> = std::result::Result<T, E>;
