use thiserror::Error;

use crate::sector::Interval;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain (e.g. Δ ≤ 1).
    #[error("domain error: {0}")]
    Domain(String),

    /// An index, count or site lies outside its admissible range.
    #[error("out of range: {0}")]
    Range(String),

    /// Two objects that must agree (interval, sector, dimension) do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("intervals {left} and {right} are not adjacent")]
    NotAdjacent { left: Interval, right: Interval },

    #[error("dense dimension {dim} exceeds the cap {cap} (set XXZ_DENSE_CAP to override)")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("interval {interval} must lie strictly inside the chain {chain}")]
    TouchesBoundary { interval: Interval, chain: Interval },

    #[error("Gram matrix is numerically singular (smallest eigenvalue {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("integer overflow computing {0}")]
    Overflow(String),

    /// Lanczos ran out of iterations; carries whatever converged.
    #[error(
        "Lanczos did not converge: {converged} of {wanted} eigenpairs within tolerance \
         (worst residual {worst_residual:e})"
    )]
    NotConverged {
        wanted: usize,
        converged: usize,
        partial_eigenvalues: Vec<f64>,
        worst_residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
