//! Tables and their CSV / JSON renderings.
//!
//! Numbers are printed in scientific notation with a fixed number of
//! significant digits (`1.234500000e-6`), non-finite values as `nan`, `inf`
//! or `-inf`. CSV uses LF line endings and a header row. JSON is
//! `{"columns": [...], "rows": [[...], ...], "notes": [...]}` with
//! non-finite numbers as `null`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::OutputFormat;

/// `x` with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{:.*e}", digits.max(1) - 1, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing remarks, e.g. why a series stops early. CSV writes them as
    /// `# ` lines after the data.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c, digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str("# ");
            out.push_str(&note.replace('\n', " "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, digits: usize) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(|c| json_cell(c, digits)).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows, "notes": self.notes });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat, digits: usize) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(digits),
            OutputFormat::Json => self.to_json(digits),
        }
    }
}

fn csv_cell(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Num(x) => format_sig(*x, digits),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(cell: &Cell, digits: usize) -> Value {
    match cell {
        // Round through the decimal text so both formats carry the same value.
        Cell::Num(x) if x.is_finite() => json!(format_sig(*x, digits).parse::<f64>().expect("formatted float")),
        Cell::Num(_) => Value::Null,
        Cell::Text(s) => json!(s),
    }
}

/// Writes `contents` under `dir`, creating parents, and returns the path.
pub fn write_file(dir: &Path, relative: &str, contents: &str) -> io::Result<PathBuf> {
    let path = dir.join(relative);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, contents)?;
    Ok(path)
}

/// Directory label for a ramp duration, e.g. `tf_0.5`.
pub fn tf_label(t_final: f64) -> String {
    format!("tf_{t_final}")
}
