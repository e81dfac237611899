use thiserror::Error;

/// Errors surfaced by the core operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence `{label}`: {reason}")]
    InvalidSequence { label: String, reason: String },

    #[error("mismatched truncation: {left} vs {right}")]
    MismatchedTruncation { left: usize, right: usize },

    #[error("scale parameter must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("weight-function grid too short: {0}")]
    GridTooShort(String),

    #[error("conjugate bracket overflow: no maximizer of xy - phi(y) below y = {cap:e} for x = {x}; phi is not superlinear on the covered range")]
    BracketOverflow { x: f64, cap: f64 },

    #[error("characteristic series did not decay within k <= {n} at order j = {j}; quotient sequence may not diverge")]
    DivergentTail { j: usize, n: usize },

    #[error("weight matrix invariant violated at (x = {x}, k = {k}): {reason}")]
    MatrixInvariant { x: f64, k: usize, reason: String },

    #[error("a weight matrix is required to classify S-type families")]
    MissingMatrix,

    #[error("unknown catalog name `{0}`")]
    UnknownCatalogName(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
