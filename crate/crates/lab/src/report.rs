//! Output formatting shared by every subcommand.
//!
//! Both formats carry the same keys: CSV as `key,value` rows under a `#`
//! metadata preamble, JSON as `{"meta": ..., "values": ...}` with insertion
//! order preserved. Floats are printed with 17 significant digits, enough to
//! round-trip every `f64` exactly, so equal outputs are byte-equal.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One report cell. `Empty` renders as an empty CSV field and JSON null.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => (*b as u8).to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A key-value report with a reproducibility preamble.
pub struct Report {
    meta: Vec<(&'static str, String)>,
    values: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report {
            meta: Vec::new(),
            values: Vec::new(),
        };
        r.meta("tool", "oracle-lab");
        r.meta("version", env!("CARGO_PKG_VERSION"));
        r.meta("command", command);
        r
    }

    pub fn meta(&mut self, key: &'static str, value: impl ToString) {
        self.meta.push((key, value.to_string()));
    }

    pub fn push(&mut self, key: impl Into<String>, value: Cell) {
        self.values.push((key.into(), value));
    }

    /// A probability row: the rounded decimal value under `key`, and when the
    /// exact dyadic form is known, `key_exact` with the `p/q` rational text.
    pub fn push_probability(
        &mut self,
        key: &str,
        p: &oracle_interrogation::combinatorics::Probability,
    ) {
        self.push(key, Cell::Float(p.value()));
        match p.exact_string() {
            Some(s) => self.push(format!("{key}_exact"), Cell::Text(s)),
            None => self.push(format!("{key}_exact"), Cell::Empty),
        }
    }

    pub fn preamble(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.preamble();
                s.push_str("key,value\n");
                for (k, v) in &self.values {
                    s.push_str(&format!("{k},{}\n", v.csv()));
                }
                s
            }
            Format::Json => {
                let mut meta = Map::new();
                for (k, v) in &self.meta {
                    meta.insert(k.to_string(), Value::from(v.as_str()));
                }
                let mut values = Map::new();
                for (k, v) in &self.values {
                    values.insert(k.clone(), v.json());
                }
                let doc = Value::Object(Map::from_iter([
                    ("meta".to_string(), Value::Object(meta)),
                    ("values".to_string(), Value::Object(values)),
                ]));
                let mut s = serde_json::to_string_pretty(&doc).expect("report serialization");
                s.push('\n');
                s
            }
        }
    }
}

/// A multi-row table (tradeoff, trial records) with fixed columns.
pub struct Table {
    meta: Vec<(&'static str, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    /// JSON key for the row array.
    rows_key: &'static str,
    /// Extra JSON-only object appended after the rows (e.g. a summary).
    pub trailer: Option<(&'static str, Value)>,
}

impl Table {
    pub fn new(command: &str, rows_key: &'static str, columns: Vec<&'static str>) -> Self {
        let mut t = Table {
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
            rows_key,
            trailer: None,
        };
        t.meta("tool", "oracle-lab");
        t.meta("version", env!("CARGO_PKG_VERSION"));
        t.meta("command", command);
        t
    }

    pub fn meta(&mut self, key: &'static str, value: impl ToString) {
        self.meta.push((key, value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = String::new();
                for (k, v) in &self.meta {
                    s.push_str(&format!("# {k}={v}\n"));
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                if let Some((k, v)) = &self.trailer {
                    let compact = serde_json::to_string(v).expect("trailer serialization");
                    s.push_str(&format!("# {k}={compact}\n"));
                }
                s
            }
            Format::Json => {
                let mut meta = Map::new();
                for (k, v) in &self.meta {
                    meta.insert(k.to_string(), Value::from(v.as_str()));
                }
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (c, v) in self.columns.iter().zip(row) {
                            obj.insert(c.to_string(), v.json());
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let mut doc = Map::new();
                doc.insert("meta".to_string(), Value::Object(meta));
                doc.insert(self.rows_key.to_string(), Value::Array(rows));
                if let Some((k, v)) = &self.trailer {
                    doc.insert(k.to_string(), v.clone());
                }
                let mut s =
                    serde_json::to_string_pretty(&Value::Object(doc)).expect("table serialization");
                s.push('\n');
                s
            }
        }
    }
}

/// Writes to the file when `--out` was given, stdout otherwise.
pub fn write_output(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing output to {}", path.display())),
        None => match std::io::stdout().write_all(content.as_bytes()) {
            // A closed pipe (e.g. `| head`) is the reader's choice, not an error.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing output to stdout"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for v in [
            0.0,
            1.0,
            0.98936462402343750,
            1.0 / 3.0,
            6.0221e23,
            f64::MIN_POSITIVE,
        ] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn report_formats_share_keys() {
        let mut r = Report::new("demo");
        r.meta("n", 4);
        r.push("alpha", Cell::Float(0.5));
        r.push("count", Cell::Int(7));
        r.push("note", Cell::Text("hi".into()));
        r.push("hole", Cell::Empty);

        let csv = r.render(Format::Csv);
        assert!(csv.starts_with("# tool=oracle-lab\n"));
        assert!(csv.contains("# command=demo\n"));
        assert!(csv.contains("alpha,5.0000000000000000e-1\n"));
        assert!(csv.contains("count,7\n"));
        assert!(csv.contains("hole,\n"));

        let json: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(json["meta"]["command"], "demo");
        assert_eq!(json["values"]["alpha"], 0.5);
        assert_eq!(json["values"]["count"], 7);
        assert_eq!(json["values"]["hole"], Value::Null);
    }

    #[test]
    fn table_renders_empty_cells_and_null() {
        let mut t = Table::new("demo", "rows", vec!["a", "b"]);
        t.push_row(vec![Cell::Float(0.25), Cell::Empty]);
        let csv = t.render(Format::Csv);
        assert!(csv.contains("a,b\n"));
        assert!(csv.contains("2.5000000000000000e-1,\n"));
        let json: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(json["rows"][0]["b"], Value::Null);
    }
}
