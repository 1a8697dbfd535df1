//! CSV and JSON emission of result tables.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidValue {
                what: "format".into(),
                reason: format!("`{other}` is not one of csv, json"),
            }),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

/// A titled table with metadata. Columns are described in the CSV header comment.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub command: String,
    /// Ordered `(key, value)` metadata: parameters, matching conditions, diagnostics.
    pub metadata: Vec<(String, Value)>,
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str) -> Self {
        Table {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn column(&mut self, name: impl Into<String>, description: impl Into<String>) {
        self.columns.push((name.into(), description.into()));
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("# direktor {} {}\n", env!("CARGO_PKG_VERSION"), self.command));
        for (k, v) in &self.metadata {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let described: Vec<String> = self.columns.iter().map(|(n, d)| format!("{n} = {d}")).collect();
        out.push_str(&format!("# columns: {}\n", described.join("; ")));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.0.as_str()))
            .map_err(|e| Error::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    fn to_json(&self) -> Result<String> {
        let mut meta = Map::new();
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), v.clone());
        }
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for ((name, _), cell) in self.columns.iter().zip(row) {
                    m.insert(name.clone(), cell.json());
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({
            "tool": "direktor",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "metadata": meta,
            "columns": self.columns.iter().map(|(n, d)| json!({"name": n, "description": d})).collect::<Vec<_>>(),
            "records": records,
        });
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("sweep");
        t.meta("preset", "isolator");
        t.column("omega", "frequency");
        t.column("flag", "status");
        t.rows.push(vec![Cell::Num(0.5), Cell::Text("ok".into())]);
        t
    }

    #[test]
    fn csv_has_comment_header() {
        let s = table().render(Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# direktor"));
        assert_eq!(lines[1], "# preset: isolator");
        assert_eq!(lines[3], "omega,flag");
        assert_eq!(lines[4], "5e-1,ok");
    }

    #[test]
    fn json_records() {
        let v: Value = serde_json::from_str(&table().render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["records"][0]["omega"], json!(0.5));
        assert_eq!(v["metadata"]["preset"], json!("isolator"));
    }
}
