use thiserror::Error;

/// Errors raised by the numerical substrate and everything built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {context} at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix order {order} exceeds the dense limit {limit}")]
    SizeOverflow { order: usize, limit: usize },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("eigenvectors are required for {0}")]
    MissingEigenvectors(&'static str),

    #[error("generator must be real-valued (max |Im| = {max_imag:e})")]
    NonRealGenerator { max_imag: f64 },

    #[error("{what} comes within {min_abs:e} of zero at x = {x} (floor {floor:e})")]
    Pole {
        what: &'static str,
        x: f64,
        min_abs: f64,
        floor: f64,
    },

    #[error("h(x) is not PT-symmetric: max |h*(x) - h(-x)| = {residual:e}")]
    SymmetryViolation { residual: f64 },

    #[error("eigenrelation residual {residual:e} exceeds {tolerance:e}")]
    EigenrelationResidual { residual: f64, tolerance: f64 },

    #[error("function is not decayed at the boundary: |f| = {boundary:e} > {tolerance:e}")]
    NotDecayed { boundary: f64, tolerance: f64 },

    #[error("solitons need distinct eta values (eta[{i}] == eta[{j}])")]
    CoincidentEtas { i: usize, j: usize },

    #[error("time step violates stability guard: dz * max|V| = {product} >= 0.5")]
    UnstableStep { product: f64 },

    #[error("reality predicate flips {flips} times on the scanned interval")]
    NonMonotone { flips: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(values: &[num_complex::Complex64], context: &'static str) -> Result<()> {
    match values
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        Some(index) => Err(Error::NonFinite { context, index }),
        None => Ok(()),
    }
}

pub(crate) fn check_len(len: usize, expected: usize) -> Result<()> {
    if len == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected,
            actual: len,
        })
    }
}
