#![allow(dead_code)]

use num_complex::Complex64;
use pls_precoding::channel::{draw_realization, trial_rng, ChannelRealization};
use pls_precoding::metrics::LinkBudget;
use pls_precoding::numerics::{CMatrix, CVector};
use pls_precoding::ScenarioConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_unit(rng: &mut impl Rng, n: usize) -> CVector {
    let v: CVector = random_matrix(rng, n, 1).column(0).into_owned();
    let norm = v.norm();
    v / c(norm)
}

/// Reference-scenario channels with `N`, `M`, `K` overridden.
pub fn scenario(n: usize, m: usize, k: usize, seed: u64, trial: u64) -> (ChannelRealization, f64) {
    let cfg = ScenarioConfig {
        n_bs_antennas: n,
        n_eve_antennas: m,
        n_users: k,
        seed,
        ..ScenarioConfig::default()
    };
    let real = draw_realization(&mut trial_rng(seed, trial), &cfg).unwrap();
    (real, LinkBudget::from_config(&cfg).unwrap().rho)
}
