//! Command-line front end for `gcdseq-core`: sequence tables, b-files, plot
//! series and analysis reports.

pub mod args;
pub mod commands;
pub mod render;

pub use args::Cli;
pub use commands::{exit_code, run, RunConfig};
