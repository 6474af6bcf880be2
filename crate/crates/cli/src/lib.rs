//! Command-line front end for `spiral-core`.
//!
//! Exit statuses: 0 on success, 2 when a checked condition does not hold
//! (direct criterion not satisfied, disk verification failed, soundness
//! counterexample found), 1 on any error. Errors are written to standard
//! error as one JSON line `{"error":{"kind":...,"message":...}}`.

pub mod args;
mod commands;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use crate::args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_SATISFIED: i32 = 2;

#[derive(Debug, Error, Serialize)]
#[error("{kind}: {message}")]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: "io", message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage", message: message.into() }
    }

    /// The single-line machine-readable form.
    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a CliError,
        }
        serde_json::to_string(&Line { error: self })
            .unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{}\",\"message\":\"unprintable\"}}}}", self.kind))
    }
}

impl From<spiral_core::Error> for CliError {
    fn from(e: spiral_core::Error) -> Self {
        Self { kind: e.kind(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::io(e.to_string())
    }
}

/// Rendered output of a command plus its exit status.
pub struct Output {
    pub body: String,
    pub status: i32,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// status. Output goes to `--out` or standard output.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let message = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let message = message.trim_start_matches("error: ").to_owned();
            eprintln!("{}", CliError::usage(message).to_line());
            return EXIT_ERROR;
        }
    };
    match commands::execute(&cli).and_then(|out| write_output(&cli, &out.body).map(|_| out.status)) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("{}", e.to_line());
            EXIT_ERROR
        }
    }
}

fn write_output(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
