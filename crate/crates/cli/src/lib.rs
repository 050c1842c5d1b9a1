//! Configuration, orchestration and artifact I/O for the `softpart` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod invariants;

pub use commands::{cmd_design, cmd_forward, cmd_simulate, cmd_validate};
pub use config::PipelineConfig;
pub use error::CliError;
