//! Library half of the `bottleneck` command: configuration, input parsing
//! and plot output.

pub mod config;
pub mod inputs;
pub mod plot;
pub mod report;

use thiserror::Error;

/// Problems with user input; the command exits with status 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("config: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("{0}")]
    Value(String),
    #[error("{0}")]
    Io(String),
    #[error("system file {0}")]
    System(String),
}
