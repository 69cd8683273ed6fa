//! Command-line harness: configuration, experiment planning and the run loop.

pub mod build;
pub mod config;
pub mod experiments;
pub mod runner;

use thiserror::Error;

pub use ontolab::report::{emit_table, TableFormat};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
