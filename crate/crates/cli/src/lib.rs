//! Command-line front end for `fh-levy`: JSON run configs, path simulation,
//! bond and option reports, the invariant suite and the pricing benchmark.

pub mod app;
pub mod bench;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod simulate;
pub mod validate;

pub use app::{run, Command, Outcome, Overrides};
pub use config::RunConfig;
pub use error::CliError;
