use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scale mismatch: operator has |lambda| = {operator}, function carries {function}")]
    ScaleMismatch { operator: String, function: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial is not harmonic (Laplacian has {0} nonzero terms)")]
    NotHarmonic(usize),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("generalized Laguerre parameter {0} is outside the admissible set")]
    InadmissibleParameter(String),

    #[error("insufficient truncation: term ratio bound {ratio} >= 1 at x = {x} with N = {terms}")]
    InsufficientTruncation { x: f64, terms: usize, ratio: f64 },

    #[error("evaluation point {point} lies outside the admissible box |component| <= {limit}")]
    Domain { point: String, limit: f64 },

    #[error("non-finite sample encountered in {0}")]
    NonFinite(String),

    #[error("function fails the decay requirement: {0}")]
    Decay(String),

    #[error("function is not radial (deviation {0:e})")]
    NotRadial(f64),

    #[error("degenerate probe set: {0}")]
    ProbeSet(String),

    #[error("calibration failed: relative scatter {scatter:e} exceeds {threshold:e}")]
    Calibration { scatter: f64, threshold: f64 },

    #[error("guardrail exceeded: {0}")]
    Guardrail(String),

    #[error("evaluation outside the ball of radius {radius} (|z| = {norm})")]
    OutOfBall { radius: f64, norm: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("ill-conditioned fit (condition number {0:e})")]
    IllConditioned(f64),

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
