use crate::ivl::Interval;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(Interval),

    #[error("{func} is undefined on {arg}")]
    Domain { func: &'static str, arg: Interval },

    #[error("tan has a pole inside {0}")]
    TanPole(Interval),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("invalid map parameters: {0}")]
    InvalidMap(String),

    #[error("cannot parse map spec {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("{0} is not supported for this map family")]
    Unsupported(&'static str),

    #[error("a rotational difference is required for the non-twist threshold")]
    MissingRho,

    #[error("shooting line y = {line} lies below half the diffusion threshold ({half_threshold})")]
    LineBelowThreshold { line: f64, half_threshold: f64 },

    #[error("no fixed point with rotation {kappa} for these parameters")]
    NoFixedPoint { kappa: i64 },

    #[error("Jacobian at the fixed point has complex eigenvalues")]
    ComplexEigenvalues,

    #[error("fixed point is not a saddle (eigenvalues {0}, {1})")]
    NotHyperbolic(f64, f64),

    #[error("local frame is numerically singular")]
    NearSingularFrame,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sweep configuration hash {found} does not match the stored run ({expected})")]
    ConfigMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
