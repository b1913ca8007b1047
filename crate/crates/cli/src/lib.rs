//! Pipeline driver behind the `ratlin` binary: configuration and problem
//! schemas, the solve and verify pipelines, and report emission.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod problem;
pub mod report;

pub use config::{Overrides, PipelineConfig};
pub use error::{CliError, CliResult};
pub use pipeline::{run, RunOutput};
pub use report::RunReport;
