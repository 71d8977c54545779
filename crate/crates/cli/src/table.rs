//! Result tables and their CSV/JSON encodings.

use serde_json::{Map, Value as Json};

/// Columns every table starts with.
pub const PROVENANCE: [&str; 4] = ["seed", "replicate", "K", "N"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Shortest decimal that parses back to the same `f64`; exponent form
/// outside `[1e-4, 1e16)`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:?}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Real(x) if x.is_finite() => serde_json::Number::from_f64(*x).map(Json::Number).unwrap_or(Json::Null),
            Cell::Real(x) => Json::String(format_real(*x)),
            Cell::Int(i) => Json::from(*i),
            Cell::Bool(b) => Json::Bool(*b),
            Cell::Text(s) => Json::String(s.clone()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Real(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Bool(b) => Some(*b as u8 as f64),
            Cell::Text(_) => None,
        }
    }
}

/// A header plus rows; the first four columns are the provenance columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

/// Provenance of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prov {
    pub seed: u64,
    pub replicate: usize,
    /// Truncation or grid size.
    pub k: usize,
    /// Monte Carlo draws or chain steps; 0 for exact computations.
    pub n: u64,
}

impl Table {
    /// Table with the provenance columns followed by `columns`.
    pub fn new(columns: &[&str]) -> Self {
        let header = PROVENANCE.iter().chain(columns).map(|s| s.to_string()).collect();
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, prov: Prov, cells: Vec<Cell>) {
        assert_eq!(cells.len() + PROVENANCE.len(), self.header.len(), "row width differs from header");
        let mut row = vec![Cell::Int(prov.seed as i64), prov.replicate.into(), prov.k.into(), prov.n.into()];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric column by name; panics if absent or non-numeric.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let j = self.column_index(name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[j].as_f64().unwrap_or_else(|| panic!("column `{name}` is not numeric"))).collect()
    }

    /// `(row, column)` of every NaN cell.
    pub fn nan_cells(&self) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if matches!(c, Cell::Real(x) if x.is_nan()) {
                    out.push((i, self.header[j].clone()));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Json {
        Json::Array(
            self.rows
                .iter()
                .map(|r| Json::Object(self.header.iter().cloned().zip(r.iter().map(Cell::json)).collect::<Map<_, _>>()))
                .collect(),
        )
    }
}
