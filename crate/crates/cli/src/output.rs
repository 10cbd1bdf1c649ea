//! Tabular report writing: one table per invocation, emitted as CSV
//! (RFC-4180-style quoting) or JSON with a fixed schema
//! `{meta: {subcommand, config, toolVersion}, data: [row objects]}`.
//!
//! Big integers are always written in full decimal, never scientific
//! notation (as JSON strings, since JSON numbers would lose precision).

use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    UInt(u64),
    Float(f64),
    /// Arbitrary-precision integer, already in decimal.
    Big(String),
    Text(String),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::Big(s) => s.clone(),
            Cell::Text(s) => csv_quote(s),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::UInt(v) => json!(v),
            Cell::Float(v) => {
                if v.is_finite() {
                    json!(v)
                } else {
                    Value::Null
                }
            }
            Cell::Big(s) => json!(s),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A finished report ready to serialize.
pub struct Report {
    pub subcommand: String,
    /// Echo of the effective configuration, in insertion order.
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(subcommand: impl Into<String>, columns: &[&str]) -> Self {
        Report {
            subcommand: subcommand.into(),
            config: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
                    out.push_str(&line.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut config = Map::new();
                for (k, v) in &self.config {
                    config.insert(k.clone(), json!(v));
                }
                let data: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (col, cell) in self.columns.iter().zip(row) {
                            obj.insert(col.clone(), cell.to_json());
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({
                    "meta": {
                        "subcommand": self.subcommand,
                        "config": Value::Object(config),
                        "toolVersion": env!("CARGO_PKG_VERSION"),
                    },
                    "data": data,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("static schema");
                s.push('\n');
                s
            }
        }
    }

    /// Writes to `path` (its directory overridable via `LCD_OUT_DIR`), or
    /// to stdout when no path is given.
    pub fn write(&self, format: Format, path: Option<&Path>) -> std::io::Result<()> {
        let rendered = self.render(format);
        match path {
            None => {
                std::io::stdout().write_all(rendered.as_bytes())?;
            }
            Some(p) => {
                let target = resolve_output_path(p);
                if let Some(parent) = target.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(target, rendered)?;
            }
        }
        Ok(())
    }
}

/// `LCD_OUT_DIR` redirects the output directory only; the file name from
/// the command line is kept.
fn resolve_output_path(path: &Path) -> PathBuf {
    match std::env::var_os("LCD_OUT_DIR") {
        Some(dir) if !dir.is_empty() => {
            let file = path.file_name().unwrap_or(path.as_os_str());
            PathBuf::from(dir).join(file)
        }
        _ => path.to_path_buf(),
    }
}
