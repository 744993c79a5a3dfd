use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid site dimensions: {0}")]
    InvalidDims(String),

    #[error("level {level} out of range for site {site} with {dim} levels")]
    LevelOutOfRange { site: usize, level: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid target sites: {0}")]
    InvalidSites(String),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown optical mode or rail: {0}")]
    UnknownMode(String),

    #[error("feed-forward references a mode outside the accepted branch: {0}")]
    DeadMode(String),

    #[error("scheme integrity violated: {0}")]
    SchemeIntegrity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
