use thiserror::Error;

/// Errors raised by the field, kernel, extraction and tracing layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel singularity: evaluation point coincides with a source point")]
    KernelSingularity,

    #[error(
        "quadrature tolerance not reached: best estimate {estimate}, achieved error {achieved:e}, requested {requested:e}"
    )]
    QuadratureTolerance {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("core not simply connected on axis: found {count} positive intervals")]
    CoreNotSimplyConnected { count: usize },

    #[error("no sign change in bracket [{lo}, {hi}]: {context}")]
    NoSignChange { lo: f64, hi: f64, context: String },

    #[error("outer radius escape: no root of the axis profile within {limit}")]
    OuterRadiusEscape { limit: f64 },

    #[error("Steiner violation at s = {s}: {detail}")]
    SteinerViolation { s: f64, detail: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 precondition, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::CoreNotSimplyConnected { .. }
            | Error::SteinerViolation { .. }
            | Error::Precondition(_) => 2,
            Error::KernelSingularity
            | Error::QuadratureTolerance { .. }
            | Error::NoSignChange { .. }
            | Error::OuterRadiusEscape { .. }
            | Error::Inconsistent(_) => 3,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 4,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
