use thiserror::Error;

/// Every failure the library reports.
///
/// Variants split into input-validation problems and numerical failures;
/// [`Error::is_numerical`] tells them apart so callers can decide whether a
/// retry with a larger budget makes sense.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{what} of size {size} exceeds the cap {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("unsupported host: {0}")]
    UnsupportedHost(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {residual:e})")]
    EigenNonConvergence { sweeps: usize, residual: f64 },

    #[error("solver did not converge: best residual {residual:e} after {iterations} iterations and {starts} starts")]
    SolverNonConvergence {
        residual: f64,
        iterations: usize,
        starts: usize,
    },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}, trace {trace:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64, trace: f64 },

    #[error("random regular graph generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

impl Error {
    /// True for failures of a numerical procedure on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenNonConvergence { .. }
                | Error::SolverNonConvergence { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::GenerationFailed { .. }
        )
    }

    pub(crate) fn param(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
