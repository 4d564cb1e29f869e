//! Monte Carlo engine: one channel realization per trial, every scheme and
//! every power split evaluated on it, then a per-cell mean and standard error.
//!
//! Trial `i` always draws from stream `(seed, i)` and results are reduced in
//! trial order, so the output does not depend on thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_realization, trial_rng, ArrayGeometry, ChannelRealization};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::metrics::{secrecy_report, LinkBudget};
use crate::numerics::CMatrix;
use crate::precoder::conventional::{default_beta, nullspace_an, rzf_data, zf_data};
use crate::precoder::eveaware::{
    dominant_eve_direction, eveaware_unnormalized, limited_eve_direction, EveDirection,
};
use crate::precoder::socp::nonlinear_precoder;
use crate::precoder::{normalize, LinearVariant, PrecoderSet, Scheme};

/// Outcome of one (scheme, phi) cell in one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Rate { sum_secrecy_rate: f64, fallback: bool },
    Failed(String),
}

impl CellOutcome {
    pub fn rate(&self) -> Option<f64> {
        match self {
            CellOutcome::Rate { sum_secrecy_rate, .. } => Some(*sum_secrecy_rate),
            CellOutcome::Failed(_) => None,
        }
    }
}

/// All cells of one trial, scheme-major in config order:
/// `cells[s * phi_grid.len() + p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: u64,
    pub cells: Vec<CellOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub scheme: Scheme,
    pub phi: f64,
    pub mean_sum_secrecy_rate: f64,
    pub std_err: f64,
    /// Trials that produced a value, fallbacks included.
    pub n_trials: usize,
    pub n_fallback: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ScenarioConfig,
    /// Scheme-major, same layout as [`TrialResult::cells`].
    pub cells: Vec<CellSummary>,
    /// Per-cell, per-trial sum secrecy rates (`None` for failed cells), in
    /// trial order. Used for paired comparisons.
    pub samples: Vec<Vec<Option<f64>>>,
}

impl SweepResult {
    pub fn cell_index(&self, scheme: Scheme, phi_index: usize) -> Option<usize> {
        let s = self.config.schemes.iter().position(|&x| x == scheme)?;
        (phi_index < self.config.phi_grid.len()).then(|| s * self.config.phi_grid.len() + phi_index)
    }

    pub fn cell(&self, scheme: Scheme, phi_index: usize) -> Option<&CellSummary> {
        self.cell_index(scheme, phi_index).map(|i| &self.cells[i])
    }

    /// Cells of one scheme in phi-grid order.
    pub fn curve(&self, scheme: Scheme) -> Vec<&CellSummary> {
        (0..self.config.phi_grid.len())
            .filter_map(|p| self.cell(scheme, p))
            .collect()
    }

    pub fn all_cells_produced(&self) -> bool {
        self.cells.iter().all(|c| c.n_failed == 0)
    }
}

/// Per-realization quantities shared by every scheme and phi.
struct TrialContext<'a> {
    real: &'a ChannelRealization,
    rho: f64,
    beta: f64,
    full_dir: std::result::Result<EveDirection, String>,
    limited_dir: EveDirection,
}

/// Unnormalized `(W~, V~)` for a linear scheme; `None` for the SOCP scheme.
fn linear_directions(ctx: &TrialContext<'_>, scheme: Scheme) -> Option<Result<(CMatrix, CMatrix)>> {
    let h = &ctx.real.users;
    let eve = |dir: &std::result::Result<EveDirection, String>, variant| match dir {
        Ok(d) => eveaware_unnormalized(h, d, variant, ctx.beta),
        Err(msg) => Err(Error::DegenerateChannel(msg.clone())),
    };
    Some(match scheme {
        Scheme::ZfConv => zf_data(h).and_then(|w| Ok((w, nullspace_an(h)?))),
        Scheme::RzfConv => rzf_data(h, ctx.beta).and_then(|w| Ok((w, nullspace_an(h)?))),
        Scheme::ZfEveFull => eve(&ctx.full_dir, LinearVariant::Zf),
        Scheme::RzfEveFull => eve(&ctx.full_dir, LinearVariant::Rzf),
        Scheme::ZfEveLimited => eveaware_unnormalized(h, &ctx.limited_dir, LinearVariant::Zf, ctx.beta),
        Scheme::RzfEveLimited => eveaware_unnormalized(h, &ctx.limited_dir, LinearVariant::Rzf, ctx.beta),
        Scheme::NonlinearSocp => return None,
    })
}

fn rate_of(ctx: &TrialContext<'_>, set: Result<PrecoderSet>) -> CellOutcome {
    match set.and_then(|s| {
        let report = secrecy_report(&ctx.real.users, &ctx.real.eve, &s, ctx.rho)?;
        Ok((report.sum_secrecy_rate, s.fallback))
    }) {
        Ok((r, fallback)) if r.is_finite() => CellOutcome::Rate { sum_secrecy_rate: r, fallback },
        Ok((r, _)) => CellOutcome::Failed(format!("non-finite sum secrecy rate {r}")),
        Err(e) => CellOutcome::Failed(e.to_string()),
    }
}

/// Evaluates every configured scheme and phi on one realization.
pub fn evaluate_realization(
    config: &ScenarioConfig,
    real: &ChannelRealization,
    budget: &LinkBudget,
    trial_index: u64,
) -> Result<TrialResult> {
    let bs = ArrayGeometry::new(config.n_bs_antennas, config.antenna_spacing)?;
    let ctx = TrialContext {
        real,
        rho: budget.rho,
        beta: default_beta(config.n_users, budget.rho),
        full_dir: dominant_eve_direction(&real.eve).map_err(|e| e.to_string()),
        limited_dir: limited_eve_direction(&bs, real.eve_los_angle),
    };
    let mut cells = Vec::with_capacity(config.schemes.len() * config.phi_grid.len());
    for &scheme in &config.schemes {
        match linear_directions(&ctx, scheme) {
            Some(Ok((w, v))) => {
                for &phi in &config.phi_grid {
                    cells.push(rate_of(&ctx, normalize(&w, &v, phi, scheme)));
                }
            }
            Some(Err(e)) => {
                let msg = e.to_string();
                cells.extend(config.phi_grid.iter().map(|_| CellOutcome::Failed(msg.clone())));
            }
            None => {
                for &phi in &config.phi_grid {
                    let set = nonlinear_precoder(&real.users, &real.eve, phi, ctx.rho).map(|o| o.precoders);
                    cells.push(rate_of(&ctx, set));
                }
            }
        }
    }
    Ok(TrialResult { trial_index, cells })
}

/// One trial: draws the realization from stream `(seed, trial_index)` and
/// evaluates every cell on it.
pub fn run_trial(config: &ScenarioConfig, trial_index: u64) -> Result<TrialResult> {
    config.validate()?;
    let budget = LinkBudget::from_config(config)?;
    let mut rng = trial_rng(config.seed, trial_index);
    let real = draw_realization(&mut rng, config)?;
    evaluate_realization(config, &real, &budget, trial_index)
}

/// Sample mean and `std / sqrt(n)` with the `n - 1` sample variance
/// (zero for a single sample).
pub fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Reduces per-trial results (in any order) into a sweep result.
pub fn aggregate(config: &ScenarioConfig, mut trials: Vec<TrialResult>) -> SweepResult {
    trials.sort_by_key(|t| t.trial_index);
    let n_phi = config.phi_grid.len();
    let n_cells = config.schemes.len() * n_phi;
    let mut cells = Vec::with_capacity(n_cells);
    let mut samples = Vec::with_capacity(n_cells);
    for c in 0..n_cells {
        let outcomes: Vec<&CellOutcome> = trials.iter().map(|t| &t.cells[c]).collect();
        let column: Vec<Option<f64>> = outcomes.iter().map(|o| o.rate()).collect();
        let values: Vec<f64> = column.iter().flatten().copied().collect();
        let (mean, std_err) = mean_and_std_err(&values);
        cells.push(CellSummary {
            scheme: config.schemes[c / n_phi],
            phi: config.phi_grid[c % n_phi],
            mean_sum_secrecy_rate: mean,
            std_err,
            n_trials: values.len(),
            n_fallback: outcomes
                .iter()
                .filter(|o| matches!(o, CellOutcome::Rate { fallback: true, .. }))
                .count(),
            n_failed: outcomes.len() - values.len(),
        });
        samples.push(column);
    }
    SweepResult { config: config.clone(), cells, samples }
}

/// Runs `n_trials` independent trials (concurrently) and aggregates them.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult> {
    config.validate()?;
    let trials = (0..config.n_trials as u64)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(config, trials))
}

/// Argmax of the mean curve over the phi grid, ties toward larger phi.
/// Cells without any value are skipped.
pub fn best_phi(result: &SweepResult, scheme: Scheme) -> Option<(f64, f64)> {
    result
        .curve(scheme)
        .into_iter()
        .filter(|c| c.n_trials > 0)
        .fold(None, |best: Option<(f64, f64)>, c| match best {
            Some((phi, rate))
                if rate > c.mean_sum_secrecy_rate
                    || (rate == c.mean_sum_secrecy_rate && phi >= c.phi) =>
            {
                Some((phi, rate))
            }
            _ => Some((c.phi, c.mean_sum_secrecy_rate)),
        })
}

/// Mean and standard error of the per-trial difference `a - b`, over trials
/// where both cells produced a value.
pub fn paired_difference(result: &SweepResult, a: (Scheme, usize), b: (Scheme, usize)) -> Option<(f64, f64)> {
    let ia = result.cell_index(a.0, a.1)?;
    let ib = result.cell_index(b.0, b.1)?;
    let diffs: Vec<f64> = result.samples[ia]
        .iter()
        .zip(&result.samples[ib])
        .filter_map(|(x, y)| Some((*x)? - (*y)?))
        .collect();
    (!diffs.is_empty()).then(|| mean_and_std_err(&diffs))
}
