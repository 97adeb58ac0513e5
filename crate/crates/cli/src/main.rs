//! Command-line front end for scattering diagrams, theta functions and verification reports.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};
use commands::{CheckArgs, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cluster_theta::Error),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
    #[error("csv: {0}")]
    Csv(csv::Error),
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    c.validate()?;
    match &cli.command {
        Command::Scatter => commands::scatter(c),
        Command::Theta { index } => commands::theta(c, index),
        Command::Val { index, covector } => commands::val(c, index, covector),
        Command::Trop { index, rays } => commands::trop(c, index, *rays),
        Command::Check { which, duality, extension, index, matrix } => commands::check(
            c,
            &CheckArgs { which: *which, duality: *duality, extension, index: index.as_deref(), matrix },
        ),
        Command::Render { index } => commands::render(c, index.as_deref()),
    }
}

/// 0 when every check passed, 1 on a check failure, 2 on usage or validation errors.
fn exit_code(result: &Result<bool, CliError>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| o.emit(cli.common.out.as_deref()).map(|_| o.passed));
    if let Err(e) = &result {
        eprintln!("error: {e}");
        if matches!(e, CliError::Core(cluster_theta::Error::Genericity { .. })) {
            eprintln!("hint: rerun with a different --perturb, e.g. --perturb '2,9;5,1'");
        }
    }
    ExitCode::from(exit_code(&result))
}
