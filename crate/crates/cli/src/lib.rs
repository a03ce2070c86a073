//! Library side of the `motion-forge` CLI: configuration, the batch
//! pipeline, and reward evaluation, kept callable from integration tests.

pub mod config;
pub mod pipeline;
pub mod reward_eval;

pub use config::{OutputFormat, PipelineConfig};
pub use pipeline::{run_pipeline, FileStatus, PipelineOutcome};
