//! Tabular reports rendered as CSV or a single JSON object.

use std::io::{self, Write};

use serde_json::{Map, Number, Value};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i128)
    }
}

impl From<i128> for Cell {
    fn from(v: i128) -> Cell {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Str(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Str(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig17(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(small) => Value::from(small),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Str(s) => Value::String(s.clone()),
        }
    }
}

/// `x` with 17 significant digits in positional notation.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// `num`, `den` and float cells of a rational, in that order.
pub fn rational_cells(r: Rational) -> [Cell; 3] {
    [Cell::Int(r.numer()), Cell::Int(r.denom()), Cell::Float(r.to_f64())]
}

/// A command's result: parameters echoed back, then columns and rows.
#[derive(Clone, Debug)]
pub struct Report {
    pub config: Map<String, Value>,
    /// `# key=value` lines written before the CSV header.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Emit the single row as top-level JSON fields instead of a `rows` array.
    pub single: bool,
}

impl Report {
    pub fn new<S: Into<String>>(config: Map<String, Value>, columns: impl IntoIterator<Item = S>) -> Report {
        let columns = columns.into_iter().map(Into::into).collect();
        Report { config, comments: Vec::new(), columns, rows: Vec::new(), single: false }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&cell.csv());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    fn object(&self, row: &[Cell]) -> Map<String, Value> {
        self.columns.iter().zip(row).map(|(k, c)| (k.clone(), c.json())).collect()
    }

    fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut top = Map::new();
        top.insert("config".to_string(), Value::Object(self.config.clone()));
        if self.single && self.rows.len() == 1 {
            top.extend(self.object(&self.rows[0]));
        } else {
            let rows = self.rows.iter().map(|r| Value::Object(self.object(r))).collect();
            top.insert("rows".to_string(), Value::Array(rows));
        }
        serde_json::to_writer(&mut *out, &Value::Object(top))?;
        writeln!(out)
    }
}
