//! Small deterministic CSV writer.
//!
//! Two header lines (column names, then units), `.` decimal separator,
//! reals in shortest round-trip scientific form, optional `# key=value`
//! footer lines.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Real(v) => write!(out, "{v:e}").unwrap(),
            Cell::Text(s) => out.push_str(s),
            Cell::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvDataset {
    columns: Vec<String>,
    units: Vec<String>,
    rows: Vec<Vec<Cell>>,
    footer: Vec<(String, String)>,
}

impl CsvDataset {
    /// `columns` pairs each name with its unit.
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.0.to_string()).collect(),
            units: columns.iter().map(|c| c.1.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    /// Appends a row, rejecting wrong widths, non-finite reals and text that
    /// would break the format.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        for (cell, name) in row.iter().zip(&self.columns) {
            match cell {
                Cell::Real(v) if !v.is_finite() => {
                    return Err(Error::DomainError(format!("non-finite value in column '{name}'")))
                }
                Cell::Text(s) if s.contains([',', '\n', '"']) => {
                    return Err(Error::DomainError(format!("unquotable text in column '{name}'")))
                }
                _ => {}
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn add_footer(&mut self, key: &str, value: impl ToString) {
        self.footer.push((key.to_string(), value.to_string()));
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn footer(&self) -> &[(String, String)] {
        &self.footer
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column; `None` for non-numeric cells.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        out.push_str(&self.units.join(","));
        out.push('\n');
        for row in &self.rows {
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        for (k, v) in &self.footer {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_two_line_header_and_footer() {
        let mut ds = CsvDataset::new(&[("N", "1"), ("gt", "gamma*tau"), ("regime", "label")]);
        ds.push(vec![4usize.into(), 0.125.into(), "inv_sqrt_n".into()]).unwrap();
        ds.push(vec![5usize.into(), 1e-7.into(), "inv_n".into()]).unwrap();
        ds.add_footer("r_crit", 2.5);
        assert_eq!(
            ds.to_csv_string(),
            "N,gt,regime\n1,gamma*tau,label\n4,1.25e-1,inv_sqrt_n\n5,1e-7,inv_n\n# r_crit=2.5\n"
        );
        assert_eq!(ds.column("gt").unwrap(), vec![Some(0.125), Some(1e-7)]);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut ds = CsvDataset::new(&[("a", "1"), ("b", "1")]);
        assert!(ds.push(vec![1.0.into()]).is_err());
        assert!(ds.push(vec![1.0.into(), f64::NAN.into()]).is_err());
        assert!(ds.push(vec![1.0.into(), "x,y".into()]).is_err());
        assert!(ds.rows().is_empty());
    }

    #[test]
    fn round_trips_reals() {
        let mut ds = CsvDataset::new(&[("x", "1")]);
        let v = 0.1 + 0.2;
        ds.push(vec![v.into()]).unwrap();
        let s = ds.to_csv_string();
        let parsed: f64 = s.lines().nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, v);
    }
}
