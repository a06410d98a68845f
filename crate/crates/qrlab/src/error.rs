//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A tensor or composition would exceed the configured dimension limit.
    #[error("dimension limit exceeded: {0}")]
    DimensionLimit(String),

    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An input value violates a type invariant (non-Hermitian, non-PSD,
    /// trace off, not trace preserving, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// An operation would exceed an enumeration or memory cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// Unknown entry in the code catalogue.
    #[error("unknown code `{0}`")]
    UnknownCode(String),

    /// Iterative solver failure (distinct from returning a non-converged
    /// solution, which is reported through the solution's flag).
    #[error("solver error: {0}")]
    Solver(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
