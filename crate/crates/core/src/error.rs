use thiserror::Error;

use crate::extremal::ExtremalDecomposition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// A constructed object failed its own invariants. Indicates a bug, not bad input.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("decomposition exceeded {max_iter} iterations with {remaining_weight:e} weight left")]
    MaxIterations {
        max_iter: usize,
        remaining_weight: f64,
        partial: Box<ExtremalDecomposition>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
