//! Result tables and their CSV/JSON encodings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Version of the JSON layout described by [`RESULT_SCHEMA`].
pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema of a table written with [`ResultTable::write_json`].
pub const RESULT_SCHEMA: &str = include_str!("../schema/result-table.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // shortest digits that parse back to the same value
            Cell::Num(v) if *v != 0.0 && (v.abs() < 1e-5 || v.abs() >= 1e16) => format!("{v:e}"),
            Cell::Num(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// `1` for dimensionless numbers, `text` for labels.
    pub unit: String,
}

/// Provenance written alongside every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub study: String,
    pub seed: u64,
    pub scale: f64,
    pub generator: String,
    pub scenario_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    schema_version: u32,
    table: &'a str,
    metadata: &'a Metadata,
    columns: &'a [Column],
    rows: &'a [Vec<Cell>],
}

impl ResultTable {
    /// `columns` are `(name, unit)` pairs.
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns
                .iter()
                .map(|(n, u)| Column {
                    name: n.to_string(),
                    unit: u.to_string(),
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    /// Panics when the row width does not match; rows are built by the
    /// studies, so a mismatch is a programming error.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in table {}", self.name);
        self.rows.push(row);
    }

    pub fn headers(&self) -> Vec<String> {
        self.columns.iter().map(|c| format!("{}({})", c.name, c.unit)).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of one column; text cells are skipped.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column_index(name) else { return Vec::new() };
        self.rows.iter().filter_map(|r| r[i].as_f64()).collect()
    }

    fn check_finite(&self, path: &Path) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(SimError::Output {
                            path: path.to_path_buf(),
                            message: format!("row {r} column '{}' holds {v}", self.columns[c].name),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.check_finite(path)?;
        let out = |e: csv::Error| SimError::Output {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(self.headers()).map_err(out)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(out)?;
        }
        w.flush().map_err(|e| io_error(path, e))
    }

    pub fn write_json(&self, path: &Path, metadata: &Metadata) -> Result<()> {
        self.check_finite(path)?;
        let doc = JsonTable {
            schema_version: SCHEMA_VERSION,
            table: &self.name,
            metadata,
            columns: &self.columns,
            rows: &self.rows,
        };
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| SimError::Output {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| io_error(path, e))
    }
}

fn io_error(path: &Path, source: std::io::Error) -> SimError {
    SimError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Header and raw records of a CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let out = |e: csv::Error| SimError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut r = csv::Reader::from_path(path).map_err(out)?;
    let headers = r.headers().map_err(out)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(out)?.iter().map(str::to_string).collect());
    }
    Ok((headers, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers_carry_units() {
        let t = ResultTable::new("t", &[("distance", "m"), ("scheme", "text")]);
        assert_eq!(t.headers(), vec!["distance(m)", "scheme(text)"]);
    }

    #[test]
    #[should_panic(expected = "row width mismatch")]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new("t", &[("a", "1")]);
        t.push(vec![1.0.into(), 2.0.into()]);
    }

    #[test]
    fn cells_render_shortest_roundtrip() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            let s = Cell::Num(v).render();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
