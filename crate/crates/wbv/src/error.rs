use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum WbvError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling failed at cell {cell}: {reason}")]
    Sampling { cell: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no admissible ball covers point {point:?}")]
    BallCoverage { point: Vec<f64> },

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {err:.3e})")]
    QuadratureNonConvergence { a: f64, b: f64, err: f64 },

    #[error("measure is not in the finite-maximal-function class: {0}")]
    MeasureClassification(String),

    #[error("test field infeasible: certificate {certificate:.6e} > 1")]
    InfeasibleField { certificate: f64 },

    #[error("sequence does not converge in L1(w): gaps {gaps:?}")]
    NonConvergentSequence { gaps: Vec<f64> },

    #[error("cover does not reach the support of f: {uncovered} uncovered cells")]
    Coverage { uncovered: usize },

    #[error(
        "mollification constraints unmeetable at grid scale for piece {piece} \
         (residual {residual:.3e} > target {target:.3e}); refine the grid"
    )]
    Resolution { piece: usize, residual: f64, target: f64 },

    #[error("inconsistent inequality data: {0}")]
    Inconsistency(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, WbvError>;
