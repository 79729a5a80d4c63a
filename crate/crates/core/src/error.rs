use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },

    #[error("degenerate search box in coordinate {coord}: lower {lower} is not below upper {upper}")]
    DegenerateBox { coord: usize, lower: f64, upper: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("objective returned a non-finite value ({value}) at agent {agent}")]
    NonFinite { agent: usize, value: f64 },

    #[error("cap cosine {0} lies outside [0, 1]")]
    CapCosine(f64),

    #[error("zero gradient has no descent orientation")]
    ZeroGradient,

    #[error("unknown benchmark '{0}'")]
    UnknownBenchmark(String),

    #[error("unknown mode '{0}' (expected 'sbrd' or 'sbgd')")]
    UnknownMode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
