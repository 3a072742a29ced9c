//! Error-to-exit-code mapping and the config header every output carries.

use std::fmt;
use std::path::Path;

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// CLI failure classes; the numeric codes are part of the interface.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, malformed JSON, or a spec rejected by validation.
    Input(String),
    /// The computation itself failed (non-finite values, no convergence,
    /// rank undecidable, rank disagreement).
    Numerical(String),
    /// Reading or writing files failed.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<hermite_lab::Error> for CliError {
    fn from(err: hermite_lab::Error) -> Self {
        use hermite_lab::Error::*;
        match err {
            Domain(_) | InvalidSpec(_) | ConstantFunction | SymmetricFunction
            | NonPolynomialSpec | BoundaryExcluded { .. } => CliError::Input(err.to_string()),
            Evaluation(_) | NumericalFailure(_) | RankExceedsTruncation { .. }
            | Embedding { .. } => CliError::Numerical(err.to_string()),
        }
    }
}

/// Provenance block embedded in every JSON output and echoed as `#` lines in
/// CSV outputs. The thread count is deliberately not part of it: results are
/// thread-count independent and the files must be too.
#[derive(Serialize)]
pub struct Generator {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
}

impl Generator {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            tool: "hermite-lab",
            version: VERSION,
            command: command.to_string(),
            config,
        }
    }

    /// `#`-prefixed header lines for CSV outputs.
    pub fn csv_lines(&self) -> Vec<String> {
        vec![
            format!("hermite-lab {} {}", self.version, self.command),
            format!("config: {}", self.config),
        ]
    }
}

/// Spec or experiment argument: inline JSON, or `@path` to a JSON file.
pub fn read_json_arg(arg: &str) -> Result<String, CliError> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    } else {
        Ok(arg.to_string())
    }
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            // Validation errors already carry their own context.
            CliError::Input(e.to_string())
        } else {
            CliError::Input(format!("invalid {what} JSON: {e}"))
        }
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))
}

/// Write to the file, or stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content).map_err(|e| CliError::io(&p.display().to_string(), e))
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, content: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError::io(&path.display().to_string(), e))
}
