//! Command-line driver for `maass-core`: configuration, file formats and
//! the `search`, `verify`, `stats`, `bessel` and `eisenstein` commands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod format;
pub mod io;
pub mod threads;

use std::fmt;

/// Bad flags, bad config or refused overwrite; exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Process exit status for a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Ran to completion but a check failed.
    ChecksFailed,
}

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exit code for an error: usage problems and invalid core configuration
/// give 2, everything else 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(maass_core::Error::Config(_)) = cause.downcast_ref::<maass_core::Error>() {
            return EXIT_USAGE;
        }
    }
    EXIT_FAILURE
}
