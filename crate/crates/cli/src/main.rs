mod commands;
mod config;
mod error;
mod table;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{Flags, RunConfig};
use crate::error::CliError;
use crate::table::Table;

fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    let text = table.render(cfg.format);
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let flags = match Flags::try_parse() {
        Ok(f) => f,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""));
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code());
        }
    };
    let result = RunConfig::resolve(flags).and_then(|cfg| match commands::run(&cfg) {
        Ok(table) => emit(&table, &cfg),
        Err(CliError::Validation { report, failed }) => {
            let mut report = *report;
            commands::stamp(&mut report, &cfg);
            emit(&report, &cfg)?;
            Err(CliError::Validation {
                report: Box::new(Table::default()),
                failed,
            })
        }
        Err(e) => Err(e),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
