use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod output;

use commands::RunError;
use config::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ptscatter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let cfg = RunConfig::resolve(cli)?;
    let outcome = commands::run(&cfg)?;
    output::emit(outcome.document, &outcome.metadata, cfg.format, cfg.out.as_deref())?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
