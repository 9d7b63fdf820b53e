//! Command-line front end. The binary in `main.rs` only parses arguments
//! and maps outcomes onto exit statuses.

pub mod commands;
pub mod config;
pub mod output;

use std::process::ExitCode;

use thiserror::Error;

use crate::config::{CommandKind, RunConfig};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "PDM_DIRAC_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadParams(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

/// Runs a resolved configuration; returns the exit status.
pub fn run(config: &RunConfig) -> Result<u8, CliError> {
    if config.dump_config {
        output::write_output(None, &config.dump())?;
        return Ok(0);
    }
    let s = &config.settings;
    let (text, status) = match config.command {
        CommandKind::Surface => (commands::surface(s, config.format)?, 0),
        CommandKind::Spectrum => (commands::spectrum(s, config.format)?, 0),
        CommandKind::Potential => (commands::potential(s, config.format)?, 0),
        CommandKind::Verdict => {
            let (report, text) = commands::verdict(s)?;
            (text, report.statement.exit_code())
        }
    };
    output::write_output(config.out.as_deref(), &text)?;
    Ok(status)
}

pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::BadParams(format!("{THREADS_ENV} must be a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::BadParams(e.to_string()))
}

pub fn exit(result: Result<u8, CliError>) -> ExitCode {
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pdm-dirac: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
