//! Tables, check results, CSV and manifest output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Float formatting shared by every CSV: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Column-ordered table; rows must match the header width.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width");
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tag: String,
    pub passed: bool,
    /// Measured quantity and the bound it was compared against.
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: &str, tag: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            tag: tag.into(),
            passed: value <= bound,
            value,
            bound,
            detail: String::new(),
        }
    }

    /// Passes when `value ≥ bound`.
    pub fn at_least(name: &str, tag: &str, value: f64, bound: f64) -> Self {
        Check {
            passed: value >= bound,
            ..Check::at_most(name, tag, value, bound)
        }
    }

    pub fn flag(name: &str, tag: &str, passed: bool) -> Self {
        Check {
            name: name.into(),
            tag: tag.into(),
            passed,
            value: if passed { 1.0 } else { 0.0 },
            bound: 1.0,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Outcome of a suite or experiment.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub name: String,
    pub checks: Vec<Check>,
    /// CSV outputs by file stem.
    pub tables: Vec<(String, Table)>,
    pub elapsed: Duration,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
        self.elapsed += other.elapsed;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub experiment: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes every table as `<stem>.csv` plus `manifest.json` into `dir`.
pub fn emit_report(
    report: &Report,
    dir: &Path,
    experiment: &str,
    config_json: &str,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>, CliError> {
    if report.checks.is_empty() && report.tables.is_empty() {
        return Err(CliError::Config("nothing to report".into()));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut outputs = Vec::new();
    for (stem, table) in &report.tables {
        let name = format!("{stem}.csv");
        let path = dir.join(&name);
        fs::write(&path, table.to_csv()?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        outputs.push(name);
        written.push(path);
    }
    let manifest = Manifest {
        tool: "fockflux",
        version: env!("CARGO_PKG_VERSION"),
        core_version: fockflux::VERSION,
        experiment: experiment.into(),
        config_sha256: sha256_hex(config_json.as_bytes()),
        seed,
        outputs,
        passed: report.passed(),
        checks: report.checks.clone(),
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        let x: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1.5.into(), 2usize.into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b,c\n1.5000000000000000e0,2,\"x,y\"\n");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
