//! Experiments behind the `sim` binary: the pulse-shape, fidelity and loss
//! sweeps of the scattering gate, the cavity reflectance and the two-cavity
//! protocol check. Each experiment produces a [`Table`] that is written as CSV
//! with a reproducibility stamp on the first line.

use std::fmt;
use std::io::Write;

pub mod config;
pub mod experiments;

pub use config::{Experiment, ExperimentConfig, RawConfig};
pub use experiments::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Simulation(#[from] cqed_gates::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// 2 for bad input, 3 for an under-resolved grid, 4 for a field that did
    /// not decay in time, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use cqed_gates::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Simulation(e) => match e.root() {
                E::InvalidArgument(_) | E::OutOfModel(_) => 2,
                E::Resolution(_) => 3,
                E::IncompleteDecay { .. } => 4,
                _ => 1,
            },
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Numeric values of column `name`; text cells are skipped.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.headers.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .filter_map(|r| match r[idx] {
                    Cell::Num(x) => Some(x),
                    Cell::Text(_) => None,
                })
                .collect(),
        )
    }

    /// Writes the stamp line, the header and the rows.
    pub fn write_csv<W: Write>(&self, stamp: &str, mut out: W) -> Result<(), CliError> {
        writeln!(out, "{stamp}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, stamp: &str) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_csv(stamp, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Runs the configured experiment and writes its CSV to the configured path,
/// or to `fallback` when none is set.
pub fn run_to<W: Write>(cfg: &ExperimentConfig, fallback: W) -> Result<(), CliError> {
    let table = run(cfg)?;
    let stamp = cfg.stamp();
    match &cfg.out {
        Some(path) => table.write_csv(&stamp, std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => table.write_csv(&stamp, fallback),
    }
}
