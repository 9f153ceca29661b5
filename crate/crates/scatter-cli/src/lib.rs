//! Command-line driver for the boundary-reconstruction pipeline: synthetic
//! photon-count data, posterior sampling, forward-solver validation, and
//! figure generation.
//!
//! The binary is `scatter`; see the subcommand docs in `main.rs`. Everything
//! testable lives here in the library.

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod validate;
pub mod workers;

pub use error::{CliError, Result};
