use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A denominator or guard value fell below the genericity threshold.
    #[error("non-generic point: {0}")]
    Genericity(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid permutation {0:?}")]
    Permutation(Vec<usize>),

    #[error("convention calibration failed: {0}")]
    Calibration(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
