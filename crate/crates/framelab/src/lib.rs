//! File formats, report emission and the `framelab` command line.

pub mod cli;
pub mod error;
pub mod format;
pub mod output;

pub use error::{AppError, Result};
