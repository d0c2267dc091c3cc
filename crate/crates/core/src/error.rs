use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IsingError {
    #[error("configuration has length {got}, model has {expected} sites")]
    LengthMismatch { expected: usize, got: usize },
    #[error("site {site} out of range for a model with {n} sites")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("site {0} is unassigned")]
    Unassigned(usize),
    #[error("spin value {value} at site {site} is not one of -1, 0, +1")]
    InvalidSpin { site: usize, value: i8 },
    #[error("self-coupling on site {0}")]
    SelfLoop(usize),
    #[error("duplicate coupling between sites {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("duplicate field on site {0}")]
    DuplicateField(usize),
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("invalid Pegasus size parameter {0} (must be >= 2)")]
    InvalidSize(usize),
    #[error("mask refers to unknown node {0}")]
    UnknownNode(usize),
    #[error("mask refers to unknown edge ({0}, {1})")]
    UnknownEdge(usize, usize),
    #[error("brute force refused: n = {n} exceeds the limit of {limit} sites")]
    TooLarge { n: usize, limit: usize },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = IsingError> = std::result::Result<T, E>;
