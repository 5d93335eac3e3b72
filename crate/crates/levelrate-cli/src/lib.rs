//! Library half of the experiment runner: configuration, datasets, artifact
//! I/O, and the command implementations the `levelrate` binary dispatches to.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod errors;
pub mod gradcheck;

pub use errors::{CliError, ExitCode};
