use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("point leaves the manifold: eigenvalue {eigenvalue:e} is below the floor {floor:e}")]
    OutOfManifold { eigenvalue: f64, floor: f64 },

    #[error("tangent payload violates its representation invariant (residual {0:e})")]
    NotTangent(f64),

    #[error("tangent vectors live at different base points")]
    BaseMismatch,

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("Legendre inversion failed after {iterations} iterations (residual {residual:e})")]
    InversionFailure { iterations: usize, residual: f64 },

    #[error("parallel transport has no closed form for alpha = {0}")]
    UnsupportedTransport(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown function name `{0}`")]
    UnknownFunction(String),

    #[error("malformed density matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
