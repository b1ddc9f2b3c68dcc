use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GzError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("root finder did not converge after {sweeps} sweeps (worst residual {residual:e})")]
    ConvergenceFailure { sweeps: usize, residual: f64 },

    #[error("degenerate spectrum: gap {gap:e} at or below tolerance {tol:e}")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error("branch mismatch at level {level}: distance {distance:e} exceeds {threshold:e}")]
    BranchMismatch {
        level: usize,
        distance: f64,
        threshold: f64,
    },

    #[error("point is not in the generic stratum: {0}")]
    NotInOmega(String),

    #[error("non-generic point: {0}")]
    NonGenericPoint(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("rejection sampling failed {0} consecutive draws")]
    SamplingFailure(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, GzError>;
