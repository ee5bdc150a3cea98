//! Tables and their CSV / JSON rendering.
//!
//! Numbers are written as the shortest decimal string that parses back to
//! the same `f64`. Column order is fixed per command.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{OutputFormat, RunConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest round-trip decimal; non-finite values as `NaN`, `inf`, `-inf`.
pub fn format_f64(x: f64) -> String {
    match serde_json::Number::from_f64(x) {
        Some(n) => n.to_string(),
        None => x.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (c, v) in self.columns.iter().zip(row) {
                        m.insert(c.clone(), v.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

fn envelope(command: &str, config: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    m
}

/// Renders `table` for `command` in the configured format.
pub fn render_table(command: &str, config: &RunConfig, table: &Table) -> String {
    match config.output_format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => {
            let mut m = envelope(command, config);
            m.insert("columns".into(), json!(table.columns));
            m.insert("rows".into(), table.json_rows());
            pretty(&Value::Object(m))
        }
    }
}

/// Renders a serializable report; CSV falls back to `table`.
pub fn render_report<R: Serialize>(command: &str, config: &RunConfig, report: &R, table: &Table) -> String {
    match config.output_format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => {
            let mut m = envelope(command, config);
            m.insert("report".into(), serde_json::to_value(report).expect("report serializes"));
            pretty(&Value::Object(m))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}
