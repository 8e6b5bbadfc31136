//! `ringsynth`: synthesis and verification of token-ring process templates.
//!
//! Exit codes: 0 on success, 1 when a property fails or no model is found,
//! 2 on usage, input or environment errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Failure of a command, mapped to the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A property failed or synthesis found nothing; already reported.
    #[error("{0}")]
    Negative(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Spec(#[from] ringsynth::ltl::LtlError),
    #[error(transparent)]
    Synth(#[from] ringsynth::synth::SynthError),
    #[error(transparent)]
    Solve(#[from] ringsynth::solve::SolveError),
    #[error(transparent)]
    Verify(#[from] ringsynth::verify::VerifyError),
    #[error(transparent)]
    Ring(#[from] ringsynth::machine::RingError),
    #[error(transparent)]
    Template(#[from] ringsynth::machine::TemplateIoError),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Negative(_) => 1,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.verbosity())
        .format_timestamp(None)
        .format_target(false)
        .init();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.code())
        }
    }
}
