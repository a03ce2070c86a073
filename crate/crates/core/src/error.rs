//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MotionError {
    #[error("frame index {index} out of range for sequence of {len} frames")]
    FrameIndexOutOfRange { index: usize, len: usize },

    #[error("joint dimension mismatch: expected {expected}, got {actual}")]
    DofMismatch { expected: usize, actual: usize },

    #[error("need at least {needed} frames, got {actual}")]
    TooFewFrames { needed: usize, actual: usize },

    #[error("invalid skeleton: {0}")]
    InvalidSkeleton(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("quaternion norm {norm} departs from unit by more than {tol}")]
    NonUnitQuaternion { norm: f64, tol: f64 },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("termination state machine already terminated")]
    AlreadyTerminated,

    #[error("unsupported motion format version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed motion file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MotionError>;
