use std::io;

use thiserror::Error;

/// Reasons a partition `n = n_1 + ... + n_tau` is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partition must contain at least one part")]
    Empty,
    #[error("part {index} is {value}; every part must be at least 1")]
    NonPositivePart { index: usize, value: i64 },
    #[error("dominance violated at k={k}: n_k = {part} < m_k = {suffix}")]
    DominanceViolation {
        k: usize,
        part: usize,
        suffix: usize,
    },
    #[error("base representation needs n >= 2 and p >= 2 (got n={n}, p={p})")]
    InvalidBase { n: usize, p: usize },
    #[error("cannot parse partition: {0}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Partition(#[from] PartitionError),

    #[error("shape mismatch: {left:?} vs {right:?} ({op})")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("level {level} out of range 1..={tau}")]
    LevelOutOfRange { level: usize, tau: usize },

    #[error("cluster {k} has size {size}, which is not a power of two")]
    NotPowerOfTwo { k: usize, size: usize },

    #[error("two-block form needs n1 >= n2 >= 1 (got n1={n1}, n2={n2})")]
    TwoBlockOrder { n1: usize, n2: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
