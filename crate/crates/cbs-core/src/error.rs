//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CbsError {
    /// Invalid user-facing input: parameters, grids, configuration files.
    #[error("configuration error: {0}")]
    Config(String),
    /// A resolvent was requested at (or numerically at) an eigenvalue.
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    /// Two Bloch eigenvalues coincide; the projector form is undefined there.
    #[error("degenerate Bloch eigenvalues (separation {0:.3e})")]
    Degenerate(f64),
    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:.6e}, error {error:.3e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
    /// Time-domain integration did not reach a quasi-stationary cycle.
    #[error("time-domain oracle did not converge: {0}")]
    NonConvergence(String),
    /// A structural invariant of the diagram catalog was violated.
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CbsError>;

impl CbsError {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CbsError::Config(_) | CbsError::Io(_) => 2,
            _ => 3,
        }
    }
}
