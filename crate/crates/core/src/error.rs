use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the validity domain: {0}")]
    Domain(String),

    #[error("precision cap of {bits} bits reached while evaluating {what}")]
    PrecisionCap { what: &'static str, bits: u32 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("field is in {found} space, expected {expected} space")]
    SpaceMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite symbol value {value} at |xi| = {xi}")]
    NonFiniteSymbol { xi: f64, value: String },

    #[error("missing history node {0}")]
    MissingHistory(usize),

    #[error("iteration did not converge after {iterations} sweeps (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("inadmissible estimate parameters: {0}")]
    Inadmissible(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
