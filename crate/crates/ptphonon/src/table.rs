//! Result tables and their CSV encoding (`docs/csv-schema.md`).

use std::io::{self, Write};

use thiserror::Error;

/// Units a column may declare.
pub const UNITS: [&str; 11] = [
    "1", "W", "m", "kg", "m/s", "s", "Hz", "1/s", "rad/s", "s^-4", "s^-6",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

/// Row flag bits.
pub mod flags {
    /// A value in the row is `inf` or `nan`.
    pub const NON_FINITE: i64 = 1;
    /// Routh–Hurwitz and eigenvalue verdicts disagree.
    pub const STABILITY_DISAGREE: i64 = 2;
    /// A requested quantity is undefined at this point (emitted as `nan`).
    pub const UNDEFINED: i64 = 4;
    /// The gain diverges and the phonon number is `inf`.
    pub const SATURATED: i64 = 8;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }

    pub fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// `key: value` metadata, written after the tool line.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SchemaError {
    #[error("column {index}: `{name}` is not a valid column name")]
    BadName { index: usize, name: String },
    #[error("column `{name}`: unit `{unit}` is not in the unit list")]
    BadUnit { name: String, unit: String },
    #[error("column `{0}` appears twice")]
    Duplicate(String),
    #[error("last column must be flags[1]")]
    MissingFlags,
    #[error("row {row} has {found} cells, expected {expected}")]
    RowWidth {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row}: non-finite value without the non-finite flag")]
    UnflaggedNonFinite { row: usize },
    #[error("row {row}: flags cell is not an integer")]
    BadFlags { row: usize },
    #[error("metadata key `{0}` is malformed")]
    BadMetadata(String),
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Shortest decimal that parses back to the same `f64`, in exponent form.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v == 0.0 {
        "0e0".into()
    } else {
        format!("{v:e}")
    }
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table {
            columns,
            ..Table::default()
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of a float column; integer cells are widened.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Float(v) => v,
                    Cell::Int(v) => v as f64,
                })
                .collect(),
        )
    }

    /// Header/unit/row consistency, run before anything is written.
    pub fn check_schema(&self) -> Result<(), SchemaError> {
        for (k, _) in &self.metadata {
            if !valid_name(k) {
                return Err(SchemaError::BadMetadata(k.clone()));
            }
        }
        for (index, c) in self.columns.iter().enumerate() {
            if !valid_name(&c.name) {
                return Err(SchemaError::BadName {
                    index,
                    name: c.name.clone(),
                });
            }
            if !UNITS.contains(&c.unit.as_str()) {
                return Err(SchemaError::BadUnit {
                    name: c.name.clone(),
                    unit: c.unit.clone(),
                });
            }
            if self.columns[..index].iter().any(|o| o.name == c.name) {
                return Err(SchemaError::Duplicate(c.name.clone()));
            }
        }
        if self.columns.last() != Some(&Column::new("flags", "1")) {
            return Err(SchemaError::MissingFlags);
        }
        let expected = self.columns.len();
        for (row, r) in self.rows.iter().enumerate() {
            if r.len() != expected {
                return Err(SchemaError::RowWidth {
                    row,
                    found: r.len(),
                    expected,
                });
            }
            let Cell::Int(f) = r[expected - 1] else {
                return Err(SchemaError::BadFlags { row });
            };
            let non_finite = r
                .iter()
                .any(|c| matches!(c, Cell::Float(v) if !v.is_finite()));
            if non_finite && f & flags::NON_FINITE == 0 {
                return Err(SchemaError::UnflaggedNonFinite { row });
            }
        }
        Ok(())
    }

    /// The header line and the rows; identical inputs give identical bytes.
    pub fn data_section(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(Column::header).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => format_float(*v),
                    Cell::Int(v) => v.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Writes metadata lines then the data section. `timestamp` is the
    /// Unix time in seconds, or `None` to omit the line.
    pub fn write_csv<W: Write>(&self, w: &mut W, timestamp: Option<u64>) -> io::Result<()> {
        self.check_schema()
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        writeln!(w, "# tool: ptphonon {}", env!("CARGO_PKG_VERSION"))?;
        if let Some(t) = timestamp {
            writeln!(w, "# timestamp_unix: {t}")?;
        }
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        w.write_all(self.data_section().as_bytes())
    }
}

/// Splits CSV text into metadata lines and the data section.
pub fn split_csv(text: &str) -> (Vec<&str>, String) {
    let mut meta = Vec::new();
    let mut data = String::new();
    for line in text.lines() {
        if let Some(m) = line.strip_prefix("# ") {
            if data.is_empty() {
                meta.push(m);
                continue;
            }
        }
        data.push_str(line);
        data.push('\n');
    }
    (meta, data)
}
