use std::fmt;
use std::process::ExitCode;

use dmaxwell::analysis::AnalysisError;
use dmaxwell::io::IoError;
use dmaxwell::maxwell::MaxwellError;
use dmaxwell::EngineError;

/// Failure classes, each with its own exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Validation,
    Runtime,
    Io,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Validation,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self.kind {
            Kind::Validation => 1,
            Kind::Runtime => 2,
            Kind::Io => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let kind = match e {
            EngineError::NonFinite { .. } | EngineError::Lattice { .. } => Kind::Runtime,
            _ => Kind::Validation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<MaxwellError> for CliError {
    fn from(e: MaxwellError) -> Self {
        match e {
            MaxwellError::Engine(e) => e.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let kind = match e {
            IoError::Io { .. } | IoError::Csv { .. } => Kind::Io,
            _ => Kind::Validation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            kind: Kind::Io,
            message: e.to_string(),
        }
    }
}
