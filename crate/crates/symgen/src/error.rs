use thiserror::Error;

/// Crate-wide error type. Operations that can reject their input return
/// `Result<T>`; contract violations that cannot occur through the public API
/// panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("intransitive input: {0}")]
    Intransitive(String),

    #[error("degree {degree} exceeds supported maximum {max}: {context}")]
    DegreeTooLarge {
        degree: usize,
        max: usize,
        context: String,
    },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
