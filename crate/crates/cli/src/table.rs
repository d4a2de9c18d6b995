//! Long-format output tables and their CSV/JSON renderings.
//!
//! CSV floats use 17 significant digits (`{:.16e}`), which round-trip to
//! the exact bit pattern; rows are emitted in the order they were pushed,
//! which every command keeps canonical. JSON mirrors the same rows as an
//! array of objects.

use serde_json::{Map, Number, Value};
use std::io::{self, Write};

/// One cell of an output table.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(u64),
    Float(f64),
    Text(String),
}

/// Named columns plus homogeneous rows, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
}

/// Round-trip-exact float rendering for CSV cells.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Header line plus one line per row, `\n`-terminated throughout.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut line = String::new();
            for (i, field) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                match field {
                    Field::Int(v) => line.push_str(&v.to_string()),
                    Field::Float(v) => line.push_str(&format_float(*v)),
                    Field::Text(v) => line.push_str(v),
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// The same records as a JSON array of flat objects.
    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut object = Map::new();
                for (name, field) in self.columns.iter().zip(row) {
                    let value = match field {
                        Field::Int(v) => Value::Number(Number::from(*v)),
                        Field::Float(v) => Number::from_f64(*v)
                            .map(Value::Number)
                            .unwrap_or(Value::Null),
                        Field::Text(v) => Value::String(v.clone()),
                    };
                    object.insert((*name).to_string(), value);
                }
                Value::Object(object)
            })
            .collect();
        Value::Array(records)
    }
}
