use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {0} has zero norm")]
    ZeroRow(usize),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("n = {n} exceeds the supported maximum of {max} for {what}")]
    TooLarge { what: &'static str, n: usize, max: usize },

    #[error("rank deficient: pivot collapsed at column {0}")]
    RankDeficient(usize),

    #[error("matrix is not positive semidefinite (pivot {0} failed even with maximum jitter)")]
    NotPsd(usize),

    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    #[error("{q} is not prime")]
    NotPrime { q: u64 },

    #[error("{q} has the wrong residue mod 4 for this construction (need {expected})")]
    BadResidue { q: u64, expected: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by the inputs violating a domain guard, as
    /// opposed to unreadable or malformed files.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Parse { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
