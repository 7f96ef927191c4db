//! File formats, instance generators and benchmark drivers behind the `auglag` binary.

use std::fmt;
use std::io;

pub mod bench;
pub mod format;
pub mod generate;
pub mod solve;

#[derive(Debug)]
pub enum CliError {
    Io(String, io::Error),
    Parse(String, serde_json::Error),
    Csv(String, csv::Error),
    Core(auglag_core::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Parse(path, e) => write!(f, "{path}: {e}"),
            CliError::Csv(path, e) => write!(f, "{path}: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<auglag_core::Error> for CliError {
    fn from(e: auglag_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Process exit status: all certified bounds held.
pub const EXIT_OK: i32 = 0;
/// Operational failure.
pub const EXIT_ERROR: i32 = 1;
/// A measured quantity exceeded its certified bound.
pub const EXIT_VIOLATION: i32 = 2;

/// Absolute slack used when comparing measured values with certified bounds.
pub const BOUND_SLACK: f64 = 1e-8;
