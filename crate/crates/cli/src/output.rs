//! Run directories, manifests and the error document.

use std::fs;
use std::path::{Path, PathBuf};

use dioph_core::Error;
use serde_json::{json, Map, Value};

pub const MANIFEST_SCHEMA: &str = "dioph.manifest/1";
pub const ERROR_SCHEMA: &str = "dioph.error/1";

/// Failure of a command, with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    pub details: Map<String, Value>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "validation".into(), message: message.into(), details: Map::new() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { code: 2, kind: "io".into(), message: format!("{}: {e}", path.display()), details: Map::new() }
    }

    pub fn to_json(&self) -> String {
        let mut err = Map::new();
        err.insert("kind".into(), json!(self.kind));
        err.insert("message".into(), json!(self.message));
        err.insert("exit_code".into(), json!(self.code));
        err.extend(self.details.clone());
        serde_json::to_string_pretty(&json!({"schema": ERROR_SCHEMA, "error": err})).expect("error serializes")
    }
}

/// 2 input, 3 mathematical precondition, 4 budget, 5 precision, 6 bug.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::ZeroDenominator
        | Error::DimensionMismatch { .. }
        | Error::Invalid(_)
        | Error::Domain(_)
        | Error::OutOfRange(_)
        | Error::Unsupported(_) => 2,
        Error::TooShort { .. } | Error::TriviallySingular { .. } | Error::HypothesisViolated { .. } | Error::Precondition(_) => 3,
        Error::Budget { .. } => 4,
        Error::PrecisionExhausted(_) | Error::NonConvergence(_) => 5,
        Error::InternalContradiction(_) => 6,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let mut details = Map::new();
        match &e {
            Error::HypothesisViolated { y, dist, bound } => {
                details.insert("violating_y".into(), json!(y));
                details.insert("dist".into(), json!(dist));
                details.insert("required".into(), json!(bound));
            }
            Error::TriviallySingular { witness } => {
                details.insert("witness".into(), json!(witness));
            }
            Error::Budget { needed, budget } => {
                details.insert("needed".into(), json!(needed.to_string()));
                details.insert("budget".into(), json!(budget.to_string()));
            }
            Error::TooShort { needed, have } => {
                details.insert("needed".into(), json!(needed));
                details.insert("have".into(), json!(have));
            }
            _ => {}
        }
        CliError { code: exit_code(&e), kind: e.kind().into(), message: e.to_string(), details }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Collects the files of one run and writes the manifest last.
pub struct RunDir {
    dir: PathBuf,
    files: Vec<(String, &'static str)>,
}

impl RunDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(RunDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    /// `schema` names the versioned document under `docs/schemas/`, or a
    /// CSV layout.
    pub fn write(&mut self, name: &str, schema: &'static str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        let mut text = contents.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.files.push((name.to_string(), schema));
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, schema: &'static str, value: &Value) -> CliResult<()> {
        self.write(name, schema, &serde_json::to_string_pretty(value).expect("json serializes"))
    }

    pub fn finish(mut self, command: &str, argv: &[String], parameters: Value) -> CliResult<()> {
        let outputs: Vec<Value> = self.files.iter().map(|(f, s)| json!({"file": f, "schema": s})).collect();
        let manifest = json!({
            "schema": MANIFEST_SCHEMA,
            "tool": "dioph",
            "versions": {"dioph-cli": env!("CARGO_PKG_VERSION"), "dioph-core": dioph_core::VERSION},
            "command": command,
            "argv": argv,
            "parameters": parameters,
            "outputs": outputs,
        });
        self.write_json("manifest.json", MANIFEST_SCHEMA, &manifest)?;
        self.files.clear();
        Ok(())
    }
}
