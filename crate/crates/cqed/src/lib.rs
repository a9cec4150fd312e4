//! Sweeps, studies, file formats and the `cqed` command line on top of
//! `cqed-core`.

pub mod cli;
pub mod config;
mod error;
pub mod experiments;
pub mod output;

pub use error::{Error, Result};
