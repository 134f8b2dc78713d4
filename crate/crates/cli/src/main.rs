mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{parse_methods, Cli, Command};
use commands::RunManifest;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    Usage(String),
    /// Solver failure for every requested formulation.
    Solver(String),
    /// Verification found constraint violations.
    Violations(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Violations(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Solver(m) | CliError::Violations(m) => m,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = &cli.common;
    let methods = parse_methods(&common.method).map_err(CliError::Usage)?;
    if let Command::Selftest = cli.command {
        let m = RunManifest::new(common, &cli.command, "-", methods);
        return commands::cmd_selftest(&m);
    }
    let scenario = io::load_scenario(common.scenario.as_deref())?;
    let m = RunManifest::new(common, &cli.command, &scenario.path, methods);
    io::ensure_dir(&m.out)?;
    match &cli.command {
        Command::Design => commands::cmd_design(&m, &scenario),
        Command::Verify {
            solutions,
            angular_deg,
        } => commands::cmd_verify(&m, &scenario, solutions, *angular_deg),
        Command::Sweep { gamma_db, ip_level_db } => commands::cmd_sweep(&m, &scenario, gamma_db, ip_level_db),
        Command::Gain { solutions } => commands::cmd_gain(&m, &scenario, solutions),
        Command::Selftest => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, e.g. piped into `head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.common.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
