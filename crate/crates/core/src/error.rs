use std::path::PathBuf;

/// Errors raised anywhere in the crate.
///
/// Numeric payloads are widened to `f64` so the type stays independent of
/// the scalar parameter.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("characteristic function has no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root refinement stalled with residual {residual:e}")]
    NotConverged { residual: f64 },

    #[error("grid mismatch: {left} nodes vs {right} nodes")]
    GridMismatch { left: usize, right: usize },

    #[error("explicit scheme unstable: dt = {dt:e} exceeds dx^2/2 = {limit:e}")]
    Unstable { dt: f64, limit: f64 },

    #[error("non-finite state at t = {t}")]
    BlowUp { t: f64 },

    #[error("eigenfunction trace B*phi vanishes; the sliding controller is undefined")]
    DegenerateTrace,

    #[error("disturbance has no certified derivative bound C")]
    MissingDerivativeBound,

    #[error("gain condition violated: {condition} (margin {margin})")]
    GainsRejected { condition: String, margin: f64 },

    #[error("fit window has {samples} samples, need at least {required}")]
    WindowTooShort { samples: usize, required: usize },

    #[error("non-positive norm {value} at sample {index}")]
    NonPositiveNorm { index: usize, value: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
