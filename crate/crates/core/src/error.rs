use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("element {element} out of range 0..={max}")]
    OutOfRange { element: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid switch specification: {0}")]
    InvalidSpec(String),

    #[error("unreachable outcome: probability {0:e} is below 1e-12")]
    UnreachableOutcome(f64),

    #[error("diagram error: {0}")]
    Diagram(String),

    #[error("infeasible search: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
