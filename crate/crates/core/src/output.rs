//! Result persistence: run manifest, CSV and JSON tables.
//!
//! Every floating-point number is written with 12 significant digits. CSV
//! cells use the `d.ddddddddddde±x` form; JSON numbers are rounded to the
//! same precision. The JSON layout is described by
//! `schema/results.schema.json` in this crate.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::harness::SweepResult;
use crate::precoder::Scheme;

pub const CSV_HEADER: [&str; 6] = [
    "scheme",
    "phi",
    "mean_sum_secrecy_rate_bps_hz",
    "std_err",
    "n_trials",
    "n_fallback",
];

pub const RESULTS_SCHEMA: &str = include_str!("../schema/results.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ScenarioConfig,
    pub artifact_version: String,
    pub seed: u64,
    /// RFC 3339 timestamps.
    pub started_at: String,
    pub finished_at: Option<String>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(config: &ScenarioConfig, outputs: Vec<PathBuf>) -> Self {
        Self {
            config: config.clone(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            started_at: now(),
            finished_at: None,
            outputs,
        }
    }

    pub fn finish(&mut self) {
        self.finished_at = Some(now());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// One output row, mirrored by the CSV and JSON forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scheme: Scheme,
    pub phi: f64,
    /// `None` when no trial produced a value.
    pub mean_sum_secrecy_rate_bps_hz: Option<f64>,
    pub std_err: Option<f64>,
    pub n_trials: usize,
    pub n_fallback: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub manifest: RunManifest,
    pub records: Vec<ResultRecord>,
}

/// `x` with 12 significant digits in scientific notation.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// `x` rounded to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    format_sig12(x).parse().expect("formatted float parses")
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn records(result: &SweepResult) -> Vec<ResultRecord> {
    result
        .cells
        .iter()
        .map(|c| ResultRecord {
            scheme: c.scheme,
            phi: c.phi,
            mean_sum_secrecy_rate_bps_hz: finite(c.mean_sum_secrecy_rate),
            std_err: finite(c.std_err),
            n_trials: c.n_trials,
            n_fallback: c.n_fallback,
        })
        .collect()
}

fn write_csv(rows: &[ResultRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let opt = |x: Option<f64>| x.map(format_sig12).unwrap_or_default();
    w.write_record(CSV_HEADER).map_err(|e| Error::io(path, e.into()))?;
    for r in rows {
        w.write_record([
            r.scheme.id().to_string(),
            format_sig12(r.phi),
            opt(r.mean_sum_secrecy_rate_bps_hz),
            opt(r.std_err),
            r.n_trials.to_string(),
            r.n_fallback.to_string(),
        ])
        .map_err(|e| Error::io(path, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json(rows: &[ResultRecord], manifest: &RunManifest, path: &Path) -> Result<()> {
    let rounded = rows
        .iter()
        .map(|r| ResultRecord {
            phi: round_sig12(r.phi),
            mean_sum_secrecy_rate_bps_hz: r.mean_sum_secrecy_rate_bps_hz.map(round_sig12),
            std_err: r.std_err.map(round_sig12),
            ..r.clone()
        })
        .collect();
    let doc = ResultsDocument { manifest: manifest.clone(), records: rounded };
    let text = serde_json::to_string_pretty(&doc).expect("results serialize");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn write_results(result: &SweepResult, format: Format, path: &Path, manifest: &RunManifest) -> Result<()> {
    let rows = records(result);
    match format {
        Format::Csv => write_csv(&rows, path),
        Format::Json => write_json(&rows, manifest, path),
    }
}

/// Reads a results CSV back into records.
pub fn read_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), message };
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| parse_err(format!("row {line}: missing column {}", CSV_HEADER[i])));
        let float = |i: usize| -> Result<Option<f64>> {
            let s = field(i)?;
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| parse_err(format!("row {line}: bad {} `{s}`", CSV_HEADER[i])))
        };
        let count = |i: usize| -> Result<usize> {
            let s = field(i)?;
            s.parse().map_err(|_| parse_err(format!("row {line}: bad {} `{s}`", CSV_HEADER[i])))
        };
        out.push(ResultRecord {
            scheme: field(0)?.parse::<Scheme>().map_err(|e| parse_err(e.to_string()))?,
            phi: float(1)?.ok_or_else(|| parse_err(format!("row {line}: empty phi")))?,
            mean_sum_secrecy_rate_bps_hz: float(2)?,
            std_err: float(3)?,
            n_trials: count(4)?,
            n_fallback: count(5)?,
        });
    }
    Ok(out)
}
