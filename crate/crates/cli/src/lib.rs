//! Config-driven experiments over `qwnlab-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod record;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use experiments::{run, RunOptions};
pub use record::{emit, Format, ResultRecord};
