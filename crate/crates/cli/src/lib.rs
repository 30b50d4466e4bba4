//! `bunchlab` command-line front end: reads a JSON experiment configuration,
//! runs the requested computation and emits JSON or CSV.

pub mod config;
pub mod error;
pub mod run;

pub use config::{ExperimentConfig, Mode};
pub use error::CliError;
pub use run::{execute, run, Args, Format, Report};
