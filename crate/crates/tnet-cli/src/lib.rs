//! Command-line experiments over the `tnet` library.
//!
//! Every subcommand produces an [`ExperimentResult`] printed as canonical
//! JSON. Failures print one JSON line on stderr and exit with 2 (usage),
//! 3 (bad input data) or 4 (numerical failure).

pub mod commands;
pub mod formats;
pub mod output;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

pub use commands::{Cli, Command};
pub use formats::{decay_to_json, network_to_json, parse_decay_file, parse_decay_str, parse_network_file, parse_network_str, FormatError};
pub use output::ExperimentResult;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// One-line JSON diagnostic.
    pub fn diagnostic(&self) -> String {
        let message = self.to_string().replace('\n', " ");
        serde_json::json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": message.trim() }).to_string()
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// What the binary should do after parsing.
pub enum Outcome {
    /// Help or version text for stdout.
    Text(String),
    Result(ExperimentResult),
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Result<(Outcome, Option<std::path::PathBuf>), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok((Outcome::Text(e.to_string()), None)),
                _ => Err(CliError::Usage(first_line(&e.to_string()))),
            };
        }
    };
    let out = cli.out.clone();
    Ok((Outcome::Result(commands::run(&cli)?), out))
}

fn first_line(s: &str) -> String {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments").trim().to_string()
}
