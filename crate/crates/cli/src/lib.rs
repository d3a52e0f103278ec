//! Experiment runner for the `osa-core` library.
//!
//! Each subcommand reads a JSON scenario, writes CSV (12 significant digits,
//! byte-stable), JSON and SVG outputs, and records a manifest with the
//! effective config and SHA-256 checksums of everything it wrote.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod plot;
pub mod presets;

pub use error::{CliError, CliResult};
