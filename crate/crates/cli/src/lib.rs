//! Command-line surface, file formats, and checkpoints for the dual-model
//! knowledge graph embedding trainer.

pub mod checkpoint;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod repr;

use crate::cli::{Cli, Command};
use crate::error::AppError;

fn dispatch(cli: &Cli) -> error::Result<()> {
    match &cli.command {
        Command::BuildDataset(args) => commands::build_dataset::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Export(args) => commands::export::run(args),
    }
}

fn print_error(e: &AppError) {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            print_error(&e);
            e.exit_code()
        }
    }
}
