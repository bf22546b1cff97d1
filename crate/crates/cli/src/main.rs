//! `photonz` command-line front-end.
//!
//! Exit status: 0 on success, 2 for argument errors, 3 for data and parse
//! errors, 4 for numerical failures.

mod cli;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use photonz::Error;

use crate::cli::{Cli, Command};

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_) | Error::Truncation { .. }) => 2,
        Some(Error::Calibration(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_)) => 3,
        Some(
            Error::NumericalFailure { .. }
            | Error::IllConditioned(_)
            | Error::ZeroLikelihood { .. },
        ) => 4,
        None if err.downcast_ref::<std::io::Error>().is_some() => 3,
        None => 2,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Ingest(args) => commands::ingest(args),
        Command::Reconstruct(args) => commands::reconstruct(args),
        Command::Moments(args) => commands::moments(args),
        Command::SpdCurve(args) => commands::spd_curve_cmd(args),
        Command::Equivalence(args) => commands::equivalence(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
