use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which half of the existence condition `N(A) ∩ T = {0}, AT ∔ S = Y` failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceFailure {
    KernelIntersection,
    DirectSum,
    Both,
}

impl fmt::Display for ExistenceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExistenceFailure::KernelIntersection => write!(f, "kernel intersection nontrivial"),
            ExistenceFailure::DirectSum => write!(f, "AT and S do not form a direct sum of Y"),
            ExistenceFailure::Both => {
                write!(f, "kernel intersection nontrivial; AT and S do not form a direct sum of Y")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("SVD of a {rows}x{cols} matrix did not converge after {sweeps} sweeps")]
    SvdNoConvergence { rows: usize, cols: usize, sweeps: usize },

    #[error("matrix is singular or ill-conditioned: condition number {cond:.3e} exceeds cap {cap:.3e}")]
    IllConditioned { cond: f64, cap: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance profile: {0}")]
    InvalidTolerance(String),

    #[error("subspace basis has rank {rank} but declares {declared} columns")]
    RankMismatch { rank: usize, declared: usize },

    #[error("range and null space do not form a direct sum of the whole space")]
    NotDirectSum,

    #[error("outer inverse does not exist: {0}")]
    NotExists(ExistenceFailure),

    #[error("not a {{1,2}}-inverse: |AZA - A| = {aza:.3e}, |ZAZ - Z| = {zaz:.3e}")]
    NotInner12Inverse { aza: f64, zaz: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cannot rotate a {dim}-dimensional subspace of a {ambient}-dimensional space")]
    NoRoomToRotate { dim: usize, ambient: usize },

    #[error("generator gave up after {retries} retries ({counts})")]
    RetriesExhausted { retries: usize, counts: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}
