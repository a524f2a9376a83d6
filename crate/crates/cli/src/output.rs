//! Output serialization: CSV with a `#`-prefixed metadata header block and a
//! JSON mirror of the same schema. Numbers are written with 17 significant
//! digits so analytic outputs are bit-stable across runs.

use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

/// A tabular result: metadata pairs, column names, and rows. String columns
/// (e.g. regime labels) are carried separately per row.
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Number(v) => format!("{v:.16e}"),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Number(v) => json!(v),
            Value::Text(s) => json!(s),
        }
    }
}

impl Table {
    pub fn new(meta: Vec<(String, String)>, columns: &[&str]) -> Self {
        Self {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json_text(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| serde_json::Value::Array(row.iter().map(Value::json).collect()))
            .collect();
        serde_json::to_string_pretty(&json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        }))
        .expect("serializable table")
        + "\n"
    }

    /// Writes the table to `stem` with extensions chosen by `format`
    /// (csv | json | both); `None` prints CSV to stdout.
    pub fn write(&self, stem: Option<&Path>, format: &str) -> std::io::Result<Vec<PathBuf>> {
        let Some(stem) = stem else {
            print!("{}", self.csv_text());
            std::io::stdout().flush()?;
            return Ok(Vec::new());
        };
        if let Some(dir) = stem.parent() {
            if !dir.as_os_str().is_empty() && !dir.exists() {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("output directory {} does not exist", dir.display()),
                ));
            }
        }
        let mut written = Vec::new();
        if format == "csv" || format == "both" {
            let path = stem.with_extension("csv");
            std::fs::write(&path, self.csv_text())?;
            written.push(path);
        }
        if format == "json" || format == "both" {
            let path = stem.with_extension("json");
            std::fs::write(&path, self.json_text())?;
            written.push(path);
        }
        Ok(written)
    }
}
