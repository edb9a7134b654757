//! Pipeline commands behind the `hcr` binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod run;

pub use config::RunConfig;
pub use error::CliError;
