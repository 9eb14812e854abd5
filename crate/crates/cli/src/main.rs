mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match commands::run(&cli.command, &cli.global) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            return ExitCode::from(2);
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().write_all(&outcome.body),
    };
    if let Err(e) = written {
        eprintln!("error[E_IO]: {e}");
        return ExitCode::from(2);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
