use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::{CliError, OutputFormat};

/// Rounds to 12 significant digits, then prints the shortest string that
/// round-trips that rounded value.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(usize),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl ToString) -> Cell {
        Cell::Text(s.to_string())
    }

    pub fn float(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            // same rounding as the CSV form
            Cell::Float(x) => serde_json::from_str(&fmt_float(*x)).unwrap_or(Value::Null),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// A table with fixed columns.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut wtr = csv::Writer::from_writer(w);
        let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
        wtr.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(Cell::csv)).map_err(io_err)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Writes `table` (and, for JSON, `extra` fields next to the rows).
pub fn emit<T: Serialize>(
    table: &Table,
    extra: Option<(&str, &T)>,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut sink = open_sink(out)?;
    match format {
        OutputFormat::Csv => table.write_csv(&mut sink)?,
        OutputFormat::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("rows".into(), table.to_json());
            if let Some((key, value)) = extra {
                obj.insert(key.into(), serde_json::to_value(value).expect("serializable"));
            }
            serde_json::to_writer_pretty(&mut sink, &obj).map_err(io::Error::other)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}
