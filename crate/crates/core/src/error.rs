//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Bad user-facing configuration (model-space size, column selections, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The requested design matrix is rank deficient.
    #[error("singular design: column(s) {columns:?} are collinear with the remaining columns")]
    SingularDesign { columns: Vec<String> },

    /// Fewer observations than design columns.
    #[error("insufficient data: {n} observation(s) for a design with {cols} column(s)")]
    InsufficientData { n: usize, cols: usize },

    /// The null model fits the response exactly, so SSE ratios are undefined.
    #[error("degenerate null model: SSE0 = {sse0:.6e} is at or below the zero floor")]
    DegenerateNull { sse0: f64 },

    /// Mixing-density hyperparameters violate their support constraint.
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),

    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numeric routine failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A caller broke an API contract (e.g. missing null-model entry).
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
