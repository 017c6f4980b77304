pub mod generate;
pub mod reproduce;
pub mod score;
pub mod search;

use std::path::Path;

use serde_json::Value;

use crate::args::Global;
use crate::error::CliError;
use crate::output::Table;
use crate::record::RunRecord;

/// Shared state of one invocation. Commands fill in the record as they go,
/// so a failing command still logs whatever it computed.
pub struct Ctx {
    pub global: Global,
    pub record: RunRecord,
    /// Extra log lines written after the run record.
    pub events: Vec<Value>,
}

#[derive(Debug, Default)]
pub struct Report {
    pub table: Option<Table>,
    /// Instance or program text; written to `--out`, else printed.
    pub artifact: Option<String>,
    /// With no `--out`, print only the artifact so it can be redirected.
    pub artifact_only: bool,
    /// Set when the command finished but a check failed.
    pub failure: Option<CliError>,
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// A float that survives JSON; infinities and NaN become strings.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(v.to_string()))
}
