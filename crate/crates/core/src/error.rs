use thiserror::Error;

/// Errors produced by the solvers and matrix primitives.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Incompatible or invalid matrix dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A matrix entry was NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The matrix failed the symmetry tolerance check.
    #[error("matrix is not symmetric: max asymmetry {max_asymmetry:.3e}")]
    NotSymmetric { max_asymmetry: f64 },

    /// A linear system was singular to working precision.
    #[error("singular linear system: condition estimate {condition:.3e}")]
    SingularSystem { condition: f64 },

    /// The trace normalizer of the map fell below the denominator floor.
    #[error("degenerate map: normalizer {lambda:.3e} is below the floor")]
    DegenerateMap { lambda: f64 },

    /// A solver precondition (stability, observability, ...) was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Bracketing, iteration, or truncation limits were exhausted.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
