//! Run records and the append-only results log.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn version() -> String {
    format!("advlab {} (dsl {})", env!("CARGO_PKG_VERSION"), advlab::search::dsl::DSL_VERSION)
}

/// Hex SHA-256 of an instance's canonical text.
pub fn fingerprint(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub kind: &'static str,
    pub run_id: String,
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub problem: Option<String>,
    pub fingerprint: Option<String>,
    /// Deterministic outputs only; timings live in `duration_secs`.
    pub scores: BTreeMap<String, Value>,
    pub duration_secs: f64,
    pub version: String,
    pub status: String,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(command: &str, args: Vec<String>, seed: u64) -> RunRecord {
        RunRecord {
            kind: "run",
            run_id: uuid::Uuid::new_v4().to_string(),
            command: command.to_string(),
            args,
            seed,
            problem: None,
            fingerprint: None,
            scores: BTreeMap::new(),
            duration_secs: 0.0,
            version: version(),
            status: "ok".into(),
            error: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.scores.insert(key.to_string(), value.into());
    }
}

/// Appends one JSON object per line under an exclusive file lock.
pub fn append_lines<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CliError> {
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).map_err(|e| CliError::Io(e.to_string()))?);
        buf.push('\n');
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| CliError::io(path, e))?;
    file.lock().map_err(|e| CliError::io(path, e))?;
    let res = file.write_all(buf.as_bytes()).and_then(|_| file.flush());
    let _ = file.unlock();
    res.map_err(|e| CliError::io(path, e))
}
