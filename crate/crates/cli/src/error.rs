//! Error surface of the CLI: every failure is either a validation problem
//! (bad parameters, exit code 2) or a runtime problem (I/O, solver, exit
//! code 1), reported as a single machine-readable JSON line on stderr.

use std::fmt::Display;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn validation(message: impl Display) -> Self {
        Self::Validation(message.to_string())
    }

    pub fn runtime(message: impl Display) -> Self {
        Self::Runtime(message.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Runtime(_) => 1,
        }
    }

    /// One-line JSON rendering for stderr.
    pub fn to_stderr_line(&self) -> String {
        let (kind, message) = match self {
            Self::Validation(m) => ("validation", m),
            Self::Runtime(m) => ("runtime", m),
        };
        serde_json::json!({ "error": kind, "message": message }).to_string()
    }
}
