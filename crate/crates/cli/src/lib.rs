//! Command-line front end: flag parsing, TOML configuration, subcommands and
//! their CSV / JSON records.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod records;

pub use args::Cli;
pub use error::CliError;
