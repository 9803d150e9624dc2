use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver aborted ({kind}): {0}", kind = abort_kind(.0))]
    Solver(chi_mhd::Error),

    #[error("{0}")]
    ChecksFailed(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

fn abort_kind(e: &chi_mhd::Error) -> &'static str {
    match e {
        chi_mhd::Error::NonFinite { .. } => "NonFinite",
        chi_mhd::Error::BlowupGuardTripped { .. } => "BlowupGuardTripped",
        chi_mhd::Error::NotContracting { .. } => "NotContracting",
        _ => "Error",
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Solver(_) => 3,
        })
    }
}

impl From<chi_mhd::Error> for CliError {
    fn from(e: chi_mhd::Error) -> Self {
        use chi_mhd::Error as E;
        match e {
            E::InvalidGrid(_)
            | E::GridMismatch
            | E::InvalidParameter(_)
            | E::InvalidState(_)
            | E::NonzeroMean { .. }
            | E::UnstableTimeStep { .. } => CliError::Config(e.to_string()),
            E::Io(_) | E::Json(_) | E::Csv(_) => CliError::Output(e.to_string()),
            _ => CliError::Solver(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
