//! The `he` command-line front end: argument and config handling, the
//! subcommands, CSV/JSON emitters and the binary lattice format.

mod args;
mod commands;
pub mod emit;
pub mod lattice_io;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Format};

/// Failure of a run, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad or missing parameters: exit 2.
    Usage(String),
    /// The computation or IO failed: exit 1.
    Runtime(anyhow::Error),
}

impl From<he_core::Error> for CliError {
    fn from(e: he_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `argv`, runs the subcommand, writes its output and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let params = args::Params::new(cli)?;
    let threads = params.threads()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(e.into()))?;
    let output = pool.install(|| commands::dispatch(cli, &params))?;
    match params.out()? {
        Some(path) => std::fs::write(&path, output)
            .map_err(|e| CliError::Runtime(anyhow::Error::new(e).context(format!("writing {}", path.display()))))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&output)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
