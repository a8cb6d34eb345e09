//! Command-line surface for `east-core`: configuration layering, the rayon
//! replica runner, and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use error::CliError;
pub use runner::RayonRunner;
