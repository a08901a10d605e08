//! Command-line front end for the `seirs` crate.
//!
//! `seirs <command> --config <path>` reads a TOML run configuration, runs one
//! analysis and prints a `key = value` report.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run, write_trajectory, Command, Output};
pub use config::{parse_config, Parsed, RunConfig};
pub use error::CliError;
pub use report::Report;
