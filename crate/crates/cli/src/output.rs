use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use symcap::Error;

/// A finished command: the JSON record, whether every check passed, and
/// any side files to write.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub result: Value,
    pub pass: bool,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    pub fn new(command: &'static str, result: Value, pass: bool) -> Self {
        Self { command, result, pass, files: Vec::new() }
    }

    /// Version-stamped record with sorted keys.
    pub fn to_json(&self) -> String {
        let doc = json!({
            "version": symcap::VERSION,
            "command": self.command,
            "pass": self.pass,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("values are finite or null");
        s.push('\n');
        s
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Unreadable or malformed input file.
    Input(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(Error::Consistency { .. }) => 3,
            Self::Core(Error::Parse(_)) | Self::Input(_) | Self::Output(_) => 2,
            Self::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Core(e) => write!(f, "{e}"),
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Any failure to read or build a file's contents counts as malformed input.
pub fn load<T>(path: &Path, parse: impl FnOnce(&str) -> symcap::Result<T>) -> Result<T, CliError> {
    parse(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes side files, then the report to `out` or stdout.
pub fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    for (path, text) in &outcome.files {
        write_file(path, text)?;
    }
    let text = outcome.to_json();
    match out {
        Some(p) => write_file(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
    }
}

/// JSON value of a serializable record; non-finite numbers become null.
pub fn value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).unwrap_or(Value::Null)
}
