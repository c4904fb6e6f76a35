//! File formats, configuration and commands for the `slumpnet` binary.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod cwv;
pub mod dataset;
pub mod manifest;

/// Stable exit codes for scripting.
pub mod exit {
    pub const OK: i32 = 0;
    /// Bad input: unreadable files, malformed config, shape mismatches.
    pub const INPUT: i32 = 2;
    /// Numeric failure: non-finite losses or parameters.
    pub const NUMERIC: i32 = 3;
    /// Verification failure: a checked property did not hold.
    pub const VERIFY: i32 = 4;
}

/// An error carrying the exit code it should terminate with.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> CliError {
        CliError { code: exit::INPUT, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> CliError {
        CliError { code: exit::NUMERIC, message: message.into() }
    }

    pub fn verify(message: impl Into<String>) -> CliError {
        CliError { code: exit::VERIFY, message: message.into() }
    }
}

impl core::fmt::Display for CliError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<slumpnet_core::Error> for CliError {
    fn from(e: slumpnet_core::Error) -> CliError {
        let code = if e.kind() == "numeric-failure" { exit::NUMERIC } else { exit::INPUT };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> CliError {
        CliError::input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Annotates an error with the file it came from.
pub(crate) fn at_path<E: Into<CliError>>(path: &std::path::Path) -> impl FnOnce(E) -> CliError + '_ {
    move |e| {
        let inner = e.into();
        CliError { code: inner.code, message: format!("{}: {}", path.display(), inner.message) }
    }
}
