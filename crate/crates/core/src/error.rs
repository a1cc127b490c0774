use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Every variant maps to a short machine-readable code (see [`Error::code`])
/// and is classified either as an input-validation problem or as a numerical
/// failure (see [`Error::is_numerical`]).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("under-resolved grid: {0}")]
    UnderResolved(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("degenerate quadrature: {0}")]
    Quadrature(String),
    #[error("ellipticity violated: {0}")]
    Ellipticity(String),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("no convergence after {iterations} iterations (last relative increment {increment:e})")]
    NoConvergence { iterations: usize, increment: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidOrder(_) => "invalid-order",
            Error::OutOfRange(_) => "out-of-range",
            Error::InvalidInput(_) => "invalid-input",
            Error::UnderResolved(_) => "under-resolved",
            Error::BasisMismatch(_) => "basis-mismatch",
            Error::Quadrature(_) => "degenerate-quadrature",
            Error::Ellipticity(_) => "ellipticity",
            Error::Eigensolver(_) => "eigensolver",
            Error::NoConvergence { .. } => "no-convergence",
            Error::Numerical(_) => "numerical",
        }
    }

    /// True for failures of the numerics themselves rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigensolver(_) | Error::NoConvergence { .. } | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
