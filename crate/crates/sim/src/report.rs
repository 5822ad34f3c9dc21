//! Monte-Carlo reports and their serialization.
//!
//! Tables are written as CSV with a fixed column order and floats in
//! `{:.16e}` form (17 significant digits). The summary (checks, provenance)
//! is JSON. Nothing machine-dependent such as timings or thread counts is
//! recorded, so reruns with the same config and seed are byte-identical.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::SimError;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Float(v) => Some(v),
            Self::Int(v) => Some(v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Empty, Into::into)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(v) => write!(f, "{v}"),
            Self::Float(v) => write!(f, "{v:.16e}"),
            Self::Text(s) => f.write_str(s),
            Self::Bool(b) => write!(f, "{b}"),
            Self::Empty => Ok(()),
        }
    }
}

/// One asserted comparison. `passed` is decided by `rule` at `tolerance`
/// and nothing else.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub empirical: f64,
    pub theoretical: f64,
    pub stderr: Option<f64>,
    pub tolerance: f64,
    pub rule: String,
    pub passed: bool,
}

impl Check {
    /// `|empirical − theoretical| ≤ tolerance`.
    pub fn abs(name: impl Into<String>, empirical: f64, theoretical: f64, stderr: Option<f64>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            theoretical,
            stderr,
            tolerance,
            rule: "abs_diff <= tolerance".into(),
            passed: (empirical - theoretical).abs() <= tolerance,
        }
    }

    /// `empirical ≤ tolerance`, for error statistics whose target is zero.
    pub fn at_most(name: impl Into<String>, empirical: f64, stderr: Option<f64>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            theoretical: 0.0,
            stderr,
            tolerance,
            rule: "value <= tolerance".into(),
            passed: empirical <= tolerance,
        }
    }

    /// `empirical ≥ tolerance`.
    pub fn at_least(name: impl Into<String>, empirical: f64, stderr: Option<f64>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            theoretical: tolerance,
            stderr,
            tolerance,
            rule: "value >= tolerance".into(),
            passed: empirical >= tolerance,
        }
    }

    /// `lo ≤ empirical ≤ hi`; the midpoint is reported as the target.
    pub fn within(name: impl Into<String>, empirical: f64, stderr: Option<f64>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            theoretical: 0.5 * (lo + hi),
            stderr,
            tolerance: 0.5 * (hi - lo),
            rule: format!("{lo} <= value <= {hi}"),
            passed: (lo..=hi).contains(&empirical),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub experiment: String,
    pub seed: u64,
    pub version: String,
    /// How random streams are derived from the seed.
    pub streams: String,
    /// The parsed config, re-serialized.
    pub config: String,
}

impl Provenance {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: cfg.experiment.kind.to_string(),
            seed: cfg.experiment.seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            streams: "ChaCha8 keyed by (seed, replicate); stream 0 latent, 1 generator, 2+k graph k, 2^32+j auxiliary"
                .to_owned(),
            config: cfg.to_toml(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub experiment: ExperimentKind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: ExperimentKind,
    all_passed: bool,
    checks: &'a [Check],
    provenance: &'a Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// CSV table plus a `.summary.json` sidecar.
    #[default]
    Csv,
    /// One JSON document with the table and the summary.
    Json,
}

impl MonteCarloReport {
    pub fn new(cfg: &ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            experiment: cfg.experiment.kind,
            columns: columns.iter().map(|&c| c.to_owned()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
            provenance: Provenance::new(cfg),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<String, SimError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string))?;
        }
        let bytes = w.into_inner().map_err(|e| SimError::config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8 csv"))
    }

    fn summary(&self) -> Summary<'_> {
        Summary {
            experiment: self.experiment,
            all_passed: self.all_passed(),
            checks: &self.checks,
            provenance: &self.provenance,
        }
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes") + "\n"
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Full<'a> {
            #[serde(flatten)]
            summary: Summary<'a>,
            columns: &'a [String],
            rows: &'a [Vec<Cell>],
        }
        let full = Full {
            summary: self.summary(),
            columns: &self.columns,
            rows: &self.rows,
        };
        serde_json::to_string_pretty(&full).expect("report serializes") + "\n"
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn check_lines(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                format!(
                    "{verdict} {}: empirical {:.6} theoretical {:.6} ({} at {})\n",
                    c.name, c.empirical, c.theoretical, c.rule, c.tolerance
                )
            })
            .collect()
    }
}

/// Path of the summary written next to a CSV report.
pub fn summary_path(path: &Path) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    path.with_file_name(name)
}

fn write(path: &Path, text: &str) -> Result<(), SimError> {
    std::fs::write(path, text).map_err(|e| SimError::io(path, e))
}

/// Writes the report to `path`; in CSV format the summary goes to
/// [`summary_path`].
pub fn emit_report(report: &MonteCarloReport, path: &Path, format: Format) -> Result<(), SimError> {
    match format {
        Format::Csv => {
            write(path, &report.to_csv()?)?;
            write(&summary_path(path), &report.summary_json())
        }
        Format::Json => write(path, &report.to_json()),
    }
}
