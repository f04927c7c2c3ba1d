use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("unbounded inverse on constants: negative power of a field with nonzero mean")]
    NonzeroMean,

    #[error("operator {op} cannot act on a {kind} field")]
    OperatorMismatch { op: &'static str, kind: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("noise: {0}")]
    Noise(String),

    #[error("mesh {coarse} does not divide {fine}")]
    MeshIncompatible { coarse: usize, fine: usize },

    #[error("Picard iteration diverged at step {step} after {} iterations (last update {:.3e})", trace.len(), trace.last().copied().unwrap_or(f64::NAN))]
    PicardDiverged { step: usize, trace: Vec<f64> },

    #[error("trajectories were driven by different Wiener paths (seed {0} vs {1})")]
    PathMismatch(u64, u64),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
