//! otlm: command-line front end for the transport linear model solver.
//!
//! Exit codes: 0 on success (a fit additionally requires convergence),
//! 1 on input or numerical errors, 2 when a fit hits its iteration cap
//! without converging (the report is still written).

use clap::Parser;

mod cli;
mod commands {
    pub mod bench;
    pub mod demo;
    pub mod fit;
    pub mod gen;
    pub mod prox;
}
mod io;
mod report;
mod runconfig;

#[derive(Debug)]
pub struct CliError {
    message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        Self { message }
    }

    pub fn io(path: &std::path::Path, err: csv::Error) -> Self {
        Self {
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok,
    NotConverged,
}

fn main() -> std::process::ExitCode {
    if let Ok(threads) = std::env::var("OTLM_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = otlm_core::init_threads(n);
            }
            _ => {
                eprintln!("error: OTLM_THREADS must be a positive integer, got '{threads}'");
                return std::process::ExitCode::from(1);
            }
        }
    }

    let cli = cli::Cli::parse();
    let result = match &cli.command {
        cli::Command::Fit(args) => commands::fit::run(args),
        cli::Command::Gen(args) => commands::gen::run(args),
        cli::Command::Demo(args) => commands::demo::run(args),
        cli::Command::Bench(args) => commands::bench::run(args),
        cli::Command::Prox(args) => commands::prox::run(args),
    };
    match result {
        Ok(ExitStatus::Ok) => std::process::ExitCode::SUCCESS,
        Ok(ExitStatus::NotConverged) => std::process::ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(1)
        }
    }
}
