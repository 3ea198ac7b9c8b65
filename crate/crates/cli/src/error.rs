use std::fmt;

use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration or artifacts.
    Config(String),
    Io(String),
    /// The construction itself failed.
    Core(scf_core::Error),
    /// `verify` found fields that differ from the stored report.
    Mismatch(Vec<String>),
    /// `sweep` finished but its criterion did not hold.
    Sweep(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Core(scf_core::Error::NotConverged { .. }) => EXIT_NOT_CONVERGED,
            CliError::Core(_) => EXIT_CONSTRUCTION,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Sweep(_) => EXIT_NOT_CONVERGED,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "Config",
            CliError::Io(_) => "Io",
            CliError::Core(e) => e.kind(),
            CliError::Mismatch(_) => "Mismatch",
            CliError::Sweep(_) => "SweepFailed",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        });
        if let CliError::Mismatch(fields) = self {
            v["error"]["fields"] = json!(fields);
        }
        v
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Mismatch(fields) => write!(f, "{} field(s) differ from the stored report", fields.len()),
            CliError::Sweep(m) => write!(f, "sweep failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<scf_core::Error> for CliError {
    fn from(e: scf_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
