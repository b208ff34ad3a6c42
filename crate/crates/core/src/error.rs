use std::path::PathBuf;

use crate::evolution::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("symbol `{name}` breaks Hermitian symmetry at k = {k}; a real input would produce a complex output")]
    BrokenSymmetry { name: String, k: i64 },

    #[error("homogeneous operator of negative order {order} applied to a field with nonzero mean {mean:e}")]
    NonzeroMean { order: f64, mean: f64 },

    #[error("derivative order {0} is outside 1..=5")]
    DerivativeOrder(usize),

    #[error("xi = 0 lies on the sign discontinuity; use the one-sided limits")]
    SignDiscontinuity,

    #[error("weight order {0} has no closed-form group bound")]
    UnsupportedWeight(u32),

    #[error("r = 3 bound requires the moment condition phi_hat(0) = 0 to be verified first")]
    MomentConditionRequired,

    #[error("missing norm {0} for the requested bound")]
    MissingNorm(&'static str),

    #[error("jump stencil width {width} invalid for n = {n} (need 2 <= width <= n/4)")]
    StencilWidth { width: usize, n: usize },

    #[error("invalid time stepping: {0}")]
    InvalidStep(String),

    #[error("solution blew up at t = {}", .0.time)]
    BlowUp(Box<BlowUp>),

    #[error("Picard iteration did not converge after {iterations} iterations (last difference {last_difference:e})")]
    NotConverged {
        iterations: usize,
        last_difference: f64,
        rates: Vec<f64>,
    },

    #[error("invalid Picard configuration: {0}")]
    InvalidPicard(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("malformed config {path}: {message}")]
    ConfigSyntax { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("csv {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// State of a run at the moment a non-finite value first appeared.
#[derive(Debug)]
pub struct BlowUp {
    pub time: f64,
    pub last_finite: Trajectory,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
