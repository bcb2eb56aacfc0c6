//! The `hecke` command line: every computation of `hecke-core` with JSON or CSV output.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 on a domain error (for example
//! `gcd(n, N) != 1`), 3 when `verify` finds a failing check. Errors are reported as an
//! envelope with an `error.reason` code.

mod args;
mod commands;
mod output;
mod verify;

use std::ffi::OsString;

use clap::Parser;
use serde_json::{Map, Value};

pub use args::{Cli, Command, Format};
pub use output::SCHEMA_VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Result of one command: a JSON payload plus an optional CSV table.
pub(crate) struct Payload {
    pub result: Value,
    pub table: output::Table,
    pub exit: i32,
}

#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Domain(hecke_core::Error),
}

impl From<hecke_core::Error> for Failure {
    fn from(e: hecke_core::Error) -> Self {
        Failure::Domain(e)
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code with the
/// text destined for standard output.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, e.to_string()),
                _ => (EXIT_USAGE, output::error_envelope("", &Map::new(), "usage", &e.to_string())),
            };
        }
    };
    let name = cli.command.name();
    let params = cli.command.params();
    match commands::dispatch(&cli.command) {
        Ok(payload) => {
            let text = match cli.format {
                Format::Json => output::envelope(name, &params, payload.result),
                Format::Csv => payload.table.to_csv(),
            };
            (payload.exit, text)
        }
        Err(Failure::Usage(msg)) => (EXIT_USAGE, output::error_envelope(name, &params, "usage", &msg)),
        Err(Failure::Domain(e)) => (EXIT_DOMAIN, output::error_envelope(name, &params, e.reason(), &e.to_string())),
    }
}

/// Parses a JSON envelope and serializes it again in canonical form.
pub fn reserialize(text: &str) -> serde_json::Result<String> {
    let v: Value = serde_json::from_str(text)?;
    Ok(output::canonical(&v))
}
