//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// `Resource` is kept distinct from the other variants because the CLI maps
/// it to a dedicated exit code: hitting a cap is an explicit failure, never a
/// silent truncation.
#[derive(Debug, Error)]
pub enum Error {
    /// A problem-instance constraint was violated.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A precondition on an operation argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configured resource cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A series truncation could not reach the requested tolerance.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// A log-domain accumulation left the representable range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// No feasible solution exists (e.g. covering candidates cannot cover).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The queried (notion, setting, s, t) cell is not covered by a
    /// classification rule.
    #[error("unsupported query: {0}")]
    Unsupported(String),

    /// A symbolic limit cannot be decided within the family grammar.
    #[error("undecidable: {0}")]
    Undecidable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
