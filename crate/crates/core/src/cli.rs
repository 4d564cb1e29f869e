//! Command-line front end.
//!
//! Precedence, lowest to highest: built-in defaults, then the `--config`
//! file, then individual flags.

use std::path::PathBuf;

use clap::Parser;

use crate::config::{parse_config, ScenarioConfig};
use crate::error::{Error, Result};
use crate::harness::{best_phi, run_sweep, SweepResult};
use crate::output::{write_results, Format, RunManifest};
use crate::plot::{emit_plot, plot_file_name};
use crate::precoder::Scheme;

#[derive(Debug, Clone, Parser)]
#[command(name = "pls-sim", version, about = "Sweep the data/AN power split for every precoding scheme")]
pub struct Args {
    /// TOML scenario file; absent keys take the reference defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of users.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated power splitting factors, e.g. `0,0.5,1`.
    #[arg(long, value_delimiter = ',')]
    pub phi_grid: Option<Vec<f64>>,
    /// Comma-separated scheme ids.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<Scheme>>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Also write an SVG chart.
    #[arg(long)]
    pub emit_plot: bool,
}

impl Args {
    pub fn resolve_config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(k) = self.k {
            cfg.n_users = k;
        }
        if let Some(n) = self.trials {
            cfg.n_trials = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(grid) = &self.phi_grid {
            cfg.phi_grid = grid.clone();
        }
        if let Some(schemes) = &self.schemes {
            cfg.schemes = schemes.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub result: SweepResult,
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Resolves the configuration, runs the sweep and writes every artifact.
/// The manifest is written before the sweep starts and rewritten with the
/// finish time at the end.
pub fn execute(args: &Args) -> Result<RunOutput> {
    let cfg = args.resolve_config()?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let manifest_path = args.out.join("manifest.json");
    let csv_path = args.out.join("results.csv");
    let json_path = args.out.join("results.json");
    let mut outputs = vec![csv_path.clone(), json_path.clone()];
    let plot_path = args.emit_plot.then(|| args.out.join(plot_file_name(cfg.n_users)));
    outputs.extend(plot_path.clone());

    let mut manifest = RunManifest::start(&cfg, outputs);
    manifest.write(&manifest_path)?;

    let result = run_sweep(&cfg)?;
    manifest.finish();
    write_results(&result, Format::Csv, &csv_path, &manifest)?;
    write_results(&result, Format::Json, &json_path, &manifest)?;
    if let Some(path) = &plot_path {
        emit_plot(&result, path)?;
    }
    manifest.write(&manifest_path)?;
    Ok(RunOutput { result, manifest, manifest_path })
}

/// One line per scheme: peak phi and rate, plus fallback and failure counts.
pub fn summary(result: &SweepResult) -> String {
    let mut out = String::new();
    for &scheme in &result.config.schemes {
        let curve = result.curve(scheme);
        let fallback: usize = curve.iter().map(|c| c.n_fallback).sum();
        let failed: usize = curve.iter().map(|c| c.n_failed).sum();
        let peak = match best_phi(result, scheme) {
            Some((phi, rate)) => format!("peak {rate:.4} bit/s/Hz at phi = {phi}"),
            None => "no values".to_string(),
        };
        out.push_str(&format!("{:<16} {peak}  fallbacks {fallback}  failures {failed}\n", scheme.id()));
    }
    out
}
