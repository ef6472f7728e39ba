use thiserror::Error;

/// Errors produced by grid construction, transforms, the solver, and
/// experiment I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Two grids that must share a shape do not.
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    /// A grid was constructed with inconsistent dimensions or non-finite data.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A scalar parameter is out of its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// The dual variable drifted away from the subdifferential of the
    /// potential at the paired primal point.
    #[error("subgradient consistency failed ({context}): residual {residual:.3e} exceeds {tol:.3e}")]
    SubgradientInconsistent {
        context: String,
        residual: f64,
        tol: f64,
    },

    /// A computed quantity became NaN or infinite.
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    /// Backtracking could not satisfy the descent conditions.
    #[error("backtracking failed at iteration {iter} after {attempts} step reductions")]
    BacktrackingFailed { iter: usize, attempts: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A text artifact (CSV, report) could not be parsed.
    #[error("parse error in {context}: {reason}")]
    Parse { context: String, reason: String },

    /// An experiment directory is missing a required file.
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(context: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            context: context.to_string(),
            reason: reason.into(),
        }
    }
}
