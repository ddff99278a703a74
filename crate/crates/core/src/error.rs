use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Incompatible arguments (dimension mismatch, wrong representation, ...).
    #[error("usage error: {0}")]
    Usage(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Input lies outside the local regime where a perturbative step is valid.
    #[error("regime error: {0}")]
    Regime(String),
    /// An iterative method exhausted its budget.
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
