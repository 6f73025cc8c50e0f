//! Command-line front end: resolves flags and config files into a
//! [`spec::RunSpec`], runs one command and writes CSV or JSON.

use std::fmt;
use std::path::{Path, PathBuf};

pub mod args;
pub mod commands;
pub mod output;
pub mod spec;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_VERIFICATION: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or contradictory options.
    Usage(String),
    /// Options parse but describe an invalid system.
    Validation(String),
    Io { path: PathBuf, message: String },
    /// The command ran but its check failed.
    Verification(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bcstab::Error> for CliError {
    fn from(e: bcstab::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub fn run(cli: args::Cli) -> Result<(), CliError> {
    let (kind, opts) = cli.command.parts();
    let opts = opts.with_config_file()?;
    let spec = spec::RunSpec::resolve(kind, &opts)?;
    commands::dispatch(spec)
}
