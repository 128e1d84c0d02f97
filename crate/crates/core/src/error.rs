use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("shape {shape} does not fit lattice: {reason}")]
    Shape { shape: String, reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target {target} outside achievable range [{min}, {max}]")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    #[error("programmed value out of range for {what}: {value} not in [{lo}, {hi}]")]
    ProgramRange { what: String, value: f64, lo: f64, hi: f64 },
    #[error("invalid embedding: {0}")]
    Embedding(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(
        "observed energy {observed} is below the ground estimate {e0}; refresh the estimate and re-evaluate the study"
    )]
    StaleGroundEstimate { e0: f64, observed: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
