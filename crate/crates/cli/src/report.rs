use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Failure, Format};

/// Everything needed to rerun a command; embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<String>,
    pub overrides: Vec<String>,
    pub seed: u64,
    pub tool_version: String,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

impl RunManifest {
    pub fn new(command: &str, config: Option<&Path>, overrides: Vec<String>, seed: u64, out: Option<&Path>, threads: Option<usize>) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()).unwrap_or_else(|| {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        });
        RunManifest {
            command: command.into(),
            config: config.map(|p| p.display().to_string()),
            overrides,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
            out: out.map(|p| p.display().to_string()),
            threads,
        }
    }
}

pub type Row = Map<String, Value>;

/// Converts a serializable record into a report row.
pub fn to_row<T: Serialize>(v: &T) -> Row {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        Ok(other) => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
        Err(e) => {
            let mut m = Map::new();
            m.insert("error".into(), Value::String(e.to_string()));
            m
        }
    }
}

pub struct Report {
    pub name: String,
    pub summary: Row,
    pub rows: Vec<Row>,
    pub passed: bool,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report { name: name.into(), summary: Map::new(), rows: Vec::new(), passed: true }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn push(&mut self, row: Row) {
        if row.get("status").and_then(Value::as_str).is_some_and(|s| s == "fail") {
            self.passed = false;
        }
        self.rows.push(row);
    }

    fn json(&self, manifest: &RunManifest) -> String {
        let mut top = Map::new();
        top.insert("manifest".into(), serde_json::to_value(manifest).unwrap());
        top.insert("passed".into(), Value::Bool(self.passed));
        top.insert("summary".into(), Value::Object(self.summary.clone()));
        top.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).unwrap();
        s.push('\n');
        s
    }

    fn csv(&self, manifest: &RunManifest) -> Result<String, Failure> {
        let mut out = Vec::new();
        writeln!(out, "# manifest: {}", serde_json::to_string(manifest).unwrap()).unwrap();
        writeln!(out, "# passed: {}", self.passed).unwrap();
        writeln!(out, "# summary: {}", serde_json::to_string(&self.summary).unwrap()).unwrap();
        out.extend(rows_to_csv(&self.rows)?);
        Ok(String::from_utf8(out).unwrap())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// Header is the union of keys in order of first appearance.
pub fn rows_to_csv(rows: &[Row]) -> Result<Vec<u8>, Failure> {
    let mut header: Vec<String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(&header).map_err(io_fail)?;
    }
    for r in rows {
        w.write_record(header.iter().map(|k| r.get(k).map(cell).unwrap_or_default())).map_err(io_fail)?;
    }
    w.into_inner().map_err(|e| Failure::Check(e.to_string()))
}

fn io_fail(e: impl std::fmt::Display) -> Failure {
    Failure::Check(format!("write failed: {e}"))
}

/// Where reports and artifacts go.
pub struct Sink {
    pub manifest: RunManifest,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn emit(&self, report: &Report) -> Result<(), Failure> {
        let (body, ext) = match self.format {
            Format::Json => (report.json(&self.manifest), "json"),
            Format::Csv => (report.csv(&self.manifest)?, "csv"),
        };
        match &self.out {
            Some(dir) => {
                let path = dir.join(format!("{}.{ext}", report.name));
                self.write(&path, body.as_bytes())?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{body}"),
        }
        let failing: Vec<&Row> = report.rows.iter().filter(|r| r.get("status").and_then(Value::as_str) == Some("fail")).collect();
        let max_residual = report.rows.iter().filter_map(|r| r.get("residual").and_then(Value::as_f64)).reduce(f64::max);
        eprintln!(
            "{}: {} rows, {} failing, max residual {}, {}",
            report.name,
            report.rows.len(),
            failing.len(),
            max_residual.map_or("n/a".into(), |v| format!("{v:.3e}")),
            if report.passed { "PASS" } else { "FAIL" }
        );
        for r in failing.iter().take(8) {
            let id = r.get("identity").and_then(Value::as_str).unwrap_or("(unnamed)");
            eprintln!("  failed: {id} {}", r.get("parameters").map(Value::to_string).unwrap_or_default());
        }
        if failing.len() > 8 {
            eprintln!("  ... {} more", failing.len() - 8);
        }
        Ok(())
    }

    /// Writes an extra file under `--out`; skipped (with a note) without one.
    pub fn artifact(&self, name: &str, bytes: &[u8]) -> Result<Option<PathBuf>, Failure> {
        match &self.out {
            Some(dir) => {
                let path = dir.join(name);
                self.write(&path, bytes)?;
                Ok(Some(path))
            }
            None => {
                eprintln!("note: {name} not written (no --out directory)");
                Ok(None)
            }
        }
    }

    /// CSV side table with the manifest as a comment line.
    pub fn csv_artifact(&self, name: &str, rows: &[Row]) -> Result<Option<PathBuf>, Failure> {
        let mut buf = format!("# manifest: {}\n", serde_json::to_string(&self.manifest).unwrap()).into_bytes();
        buf.extend(rows_to_csv(rows)?);
        self.artifact(name, &buf)
    }

    fn write(&self, path: &Path, bytes: &[u8]) -> Result<(), Failure> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
    }
}
