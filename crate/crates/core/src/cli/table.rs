use super::config::Format;
use serde_json::{Map, Value};
use std::fmt::Write as _;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip text for `v`, in exponent form outside `[1e-4, 1e16)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// A rectangular table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    /// Header row then one line per row. Numbers use the shortest
    /// representation that round-trips; empty cells are blank.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                match cell {
                    Cell::Num(v) => s.push_str(&format_number(*v)),
                    Cell::Int(v) => write!(s, "{v}").expect("string write"),
                    Cell::Text(t) if t.contains([',', '"', '\n']) => {
                        write!(s, "\"{}\"", t.replace('"', "\"\"")).expect("string write")
                    }
                    Cell::Text(t) => s.push_str(t),
                    Cell::Empty => {}
                }
            }
            s.push('\n');
        }
        s
    }

    /// Array of row objects. Empty and non-finite cells become `null`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (name, cell) in self.columns.iter().zip(row) {
                        let v = match cell {
                            Cell::Num(v) => {
                                serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number)
                            }
                            Cell::Int(v) => Value::from(*v),
                            Cell::Text(t) => Value::from(t.as_str()),
                            Cell::Empty => Value::Null,
                        };
                        m.insert((*name).to_string(), v);
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}
