//! Command-line frontend for the road-scene preprocessing library: file
//! formats (PNG conventions, model JSON, config JSON), the stable exit-code
//! contract, and the subcommand implementations.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod pngio;

pub use error::{CliError, Result};
