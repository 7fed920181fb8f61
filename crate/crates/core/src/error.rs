use thiserror::Error;

/// Errors raised by the simulator and the experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("database size must be a power of two >= 2, got {0}")]
    InvalidSize(usize),

    #[error("marked index {marked} out of range for N = {size}")]
    MarkedOutOfRange { marked: usize, size: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("interpolation parameter s = {0} outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("time t = {t} outside [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("adiabaticity parameter must satisfy 0 < eps < 1, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("N = {size} exceeds the dense oracle cap of {cap}")]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("gap model returned a nonpositive value {gap} at s = {s}")]
    NonPositiveGap { s: f64, gap: f64 },

    #[error("step limit of {0} exceeded while synthesizing a schedule")]
    StepLimit(usize),

    #[error("state became nonfinite at t = {0}")]
    NonFinite(f64),

    #[error("no total time up to {cap} reaches success probability {target}")]
    BracketNotFound { target: f64, cap: f64 },

    #[error("power-law fit needs {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("power-law fit requires positive data, got ({x}, {y})")]
    NonPositiveData { x: f64, y: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
