//! Command-line front end for `boettcher-core`: config ingestion, command dispatch and report emission.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ConfigError, Overrides, RunConfig};
pub use run::{run_command, ErrorInfo, Outcome, Report, Status, SCHEMA};
