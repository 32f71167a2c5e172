use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HlError {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition {parts:?} has {len} nonzero parts, at most {max} allowed for n = {n}")]
    TooManyParts { parts: Vec<usize>, len: usize, max: usize, n: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("enumeration budget of {budget} items exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HlError>;
