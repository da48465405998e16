//! CSV and JSON rendering with a fixed number of significant digits.

use serde_json::{Map, Number, Value};

use crate::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Quantity that cannot be computed for this input: empty in CSV, null in JSON.
    Missing,
}

/// Rows under a fixed header; rendered as CSV lines or a JSON array of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// `flat` emits a single row as a bare JSON object instead of an array.
    pub fn render(&self, format: Format, precision: usize, flat: bool) -> String {
        match format {
            Format::Csv => self.csv(precision),
            Format::Json => {
                let mut objects: Vec<Value> = self.rows.iter().map(|r| self.object(r, precision)).collect();
                let value = if flat && objects.len() == 1 {
                    objects.pop().unwrap()
                } else {
                    Value::Array(objects)
                };
                let mut text = serde_json::to_string_pretty(&value).expect("json values are finite");
                text.push('\n');
                text
            }
        }
    }

    fn csv(&self, precision: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Num(v) => format_number(*v, precision),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(t) => quote(t),
                    Cell::Missing => String::new(),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn object(&self, row: &[Cell], precision: usize) -> Value {
        let mut map = Map::new();
        for (name, cell) in self.columns.iter().zip(row) {
            map.insert(name.clone(), json_cell(cell, precision));
        }
        Value::Object(map)
    }
}

fn quote(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

pub(crate) fn json_cell(cell: &Cell, precision: usize) -> Value {
    match cell {
        Cell::Num(v) => Number::from_f64(round_significant(*v, precision)).map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(t) => Value::from(t.clone()),
        Cell::Missing => Value::Null,
    }
}

/// Rounds to `digits` significant decimal digits.
pub(crate) fn round_significant(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits - 1, v).parse().expect("scientific notation parses")
}

/// Shortest text that parses back to the rounded value; plain notation for
/// moderate magnitudes, exponent notation otherwise.
pub(crate) fn format_number(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_significant(v, digits);
    let magnitude = r.abs();
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&magnitude) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
