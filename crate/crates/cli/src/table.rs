//! Tabular results and their CSV/JSON encodings.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::spec::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; text cells read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn text_column(&self, name: &str) -> Option<Vec<String>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(x) => format!("{x:.16e}"),
                    Cell::Text(s) => s.clone(),
                })
                .collect(),
        )
    }

    pub fn to_csv(&self, timestamp: bool) -> CliResult<String> {
        let mut buf = Vec::new();
        if timestamp {
            writeln!(buf, "# generated: {}", unix_seconds()).map_err(|e| CliError::Output(e.to_string()))?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns).map_err(|e| CliError::Output(e.to_string()))?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(|e| CliError::Output(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Output(e.to_string()))?;
        }
        String::from_utf8(buf).map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_json(&self, timestamp: bool) -> CliResult<String> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        if timestamp {
            doc.insert("generated".into(), json!(unix_seconds()));
        }
        doc.insert("columns".into(), json!(self.columns));
        doc.insert("records".into(), Value::Array(records));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| CliError::Output(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format, timestamp: bool) -> CliResult<String> {
        match format {
            Format::Csv => self.to_csv(timestamp),
            Format::Json => self.to_json(timestamp),
        }
    }

    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&self, path: Option<&Path>, format: Format, timestamp: bool) -> CliResult<()> {
        let text = self.render(format, timestamp)?;
        match path {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
        }
    }
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}
