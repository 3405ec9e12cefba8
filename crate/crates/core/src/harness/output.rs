//! CSV datasets with a `#`-prefixed metadata header, and JSON sidecars.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::VERSION;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// A dataset about to be written.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key: value` header lines.
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Renders the file; fails if any number is NaN or infinite.
    pub fn render(&self, command: &str, config_echo: &str) -> Result<String> {
        let mut head = format!("# xy-qcr v{VERSION}\n# command: {command}\n");
        for (k, v) in &self.meta {
            head.push_str(&format!("# {k}: {v}\n"));
        }
        for line in config_echo.lines().filter(|l| !l.trim().is_empty()) {
            head.push_str(&format!("# config: {line}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            if row.len() != self.columns.len() {
                return Err(Error::Io(format!(
                    "row has {} cells, expected {}",
                    row.len(),
                    self.columns.len()
                )));
            }
            let mut record = Vec::with_capacity(row.len());
            for cell in row {
                record.push(match cell {
                    Cell::Num(v) if !v.is_finite() => return Err(Error::NonFinite("dataset row")),
                    Cell::Num(v) => format!("{v:e}"),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                });
            }
            w.write_record(&record).map_err(io)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
            .map_err(|e| Error::Io(e.to_string()))?;
        Ok(head + &body)
    }

    pub fn write(&self, path: &Path, command: &str, config_echo: &str) -> Result<()> {
        let text = self.render(command, config_echo)?;
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, text)?;
        Ok(())
    }
}

/// Pretty JSON with a version field, written with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Versioned<'a, T> {
        version: &'a str,
        #[serde(flatten)]
        body: &'a T,
    }
    let text = serde_json::to_string_pretty(&Versioned {
        version: VERSION,
        body: value,
    })
    .map_err(|e| Error::Io(e.to_string()))?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text + "\n")?;
    Ok(())
}
