use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unbound symbol `{name}` at position {position}")]
    UnboundSymbol { name: String, position: usize },

    #[error("non-integer exponent at position {position}")]
    NonIntegerExponent { position: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("chart mismatch: expected {expected}, found {found}")]
    ChartMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("Fock dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("cutoff {cutoff} is below the minimum {min}")]
    CutoffTooSmall { cutoff: usize, min: usize },

    #[error("amplitude overflow in mode {mode}: |z|^2 = {norm_sqr} exceeds cutoff/4 = {limit}")]
    AmplitudeOverflow {
        mode: usize,
        norm_sqr: f64,
        limit: f64,
    },

    #[error("operator is not Hermitian-paired; the master equation needs a conjugate partner for every word")]
    MissingPairing,

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole at alpha = {alpha}: 1 - 4 sin^2 cos^2 vanishes")]
    Pole { alpha: f64 },

    #[error("alpha = {alpha} is within {margin} of pi/4")]
    PoleProximity { alpha: f64, margin: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
