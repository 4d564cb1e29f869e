//! Link budget, legitimate-user SINR, eavesdropper MMSE SINR and secrecy
//! rates.
//!
//! Precoders are normalized to unit total energy with the transmit power
//! factored out, so the noise term in every SINR is `1 / rho` with
//! `rho = P_tx / sigma_n^2` in linear units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_pd_solve, CMatrix, CVector};
use crate::precoder::PrecoderSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    /// Linear transmit SNR `P_tx / sigma_n^2`.
    pub rho: f64,
}

impl LinkBudget {
    pub fn new(
        tx_power_dbm: f64,
        thermal_noise_dbm_hz: f64,
        bandwidth_hz: f64,
        noise_figure_db: f64,
    ) -> Result<Self> {
        if !(bandwidth_hz > 0.0) {
            return Err(Error::InvalidInput(format!("bandwidth {bandwidth_hz} Hz must be positive")));
        }
        let noise_power_dbm = thermal_noise_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db;
        let rho = 10f64.powf((tx_power_dbm - noise_power_dbm) / 10.0);
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidInput(format!("link budget gives SNR {rho}")));
        }
        Ok(Self {
            tx_power_dbm,
            noise_power_dbm,
            rho,
        })
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        Self::new(
            cfg.tx_power_dbm,
            cfg.thermal_noise_dbm_hz,
            cfg.bandwidth_hz,
            cfg.noise_figure_db,
        )
    }

    pub fn rho_db(&self) -> f64 {
        self.tx_power_dbm - self.noise_power_dbm
    }

    /// Noise standard deviation relative to the transmit amplitude.
    pub fn normalized_noise_std(&self) -> f64 {
        self.rho.recip().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrReport {
    pub per_user_sinr: Vec<f64>,
    pub per_user_eve_sinr: Vec<f64>,
    pub per_user_secrecy_rate: Vec<f64>,
    pub sum_secrecy_rate: f64,
}

fn gain(h: &CVector, w: nalgebra::DVectorView<'_, Complex64>) -> f64 {
    h.dotc(&w).norm_sqr()
}

/// SINR of user `u` with interference from the other data streams and the
/// AN streams.
pub fn user_sinr(u: usize, h: &CMatrix, precoders: &PrecoderSet, rho: f64) -> f64 {
    let hu: CVector = h.column(u).into_owned();
    let signal = gain(&hu, precoders.data.column(u));
    let interference: f64 = precoders
        .data
        .column_iter()
        .enumerate()
        .filter(|&(k, _)| k != u)
        .map(|(_, w)| gain(&hu, w))
        .sum();
    let an: f64 = precoders.an.column_iter().map(|v| gain(&hu, v)).sum();
    signal / (interference + an + rho.recip())
}

/// Output SINR of the eavesdropper's MMSE combiner for stream `u`,
/// `w_u^H H_e (H_e^H V V^H H_e + I / rho)^-1 H_e^H w_u`.
pub fn eve_sinr(u: usize, h_e: &CMatrix, precoders: &PrecoderSet, rho: f64) -> Result<f64> {
    let m = h_e.ncols();
    let leak = h_e.adjoint() * precoders.data.column(u);
    if leak.norm_squared() == 0.0 {
        return Ok(0.0);
    }
    let an_seen = h_e.adjoint() * &precoders.an;
    let cov = &an_seen * an_seen.adjoint() + CMatrix::identity(m, m) * Complex64::new(rho.recip(), 0.0);
    let x = hermitian_pd_solve(&cov, &CMatrix::from_column_slice(m, 1, leak.as_slice()))?;
    Ok(leak.dotc(&x.column(0)).re.max(0.0))
}

/// `[log2(1 + SINR_u) - log2(1 + SINR_e)]^+`.
pub fn secrecy_rate(user_sinr: f64, eve_sinr: f64) -> f64 {
    ((1.0 + user_sinr).log2() - (1.0 + eve_sinr).log2()).max(0.0)
}

pub fn secrecy_report(
    h: &CMatrix,
    h_e: &CMatrix,
    precoders: &PrecoderSet,
    rho: f64,
) -> Result<SinrReport> {
    let k = precoders.n_users();
    if h.ncols() != k || h.nrows() != precoders.data.nrows() || h_e.nrows() != h.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "H {:?}, H_e {:?}, W {:?}",
            h.shape(),
            h_e.shape(),
            precoders.data.shape()
        )));
    }
    let per_user_sinr: Vec<f64> = (0..k).map(|u| user_sinr(u, h, precoders, rho)).collect();
    let per_user_eve_sinr = (0..k)
        .map(|u| eve_sinr(u, h_e, precoders, rho))
        .collect::<Result<Vec<_>>>()?;
    let per_user_secrecy_rate: Vec<f64> = per_user_sinr
        .iter()
        .zip(&per_user_eve_sinr)
        .map(|(&s, &e)| secrecy_rate(s, e))
        .collect();
    Ok(SinrReport {
        sum_secrecy_rate: per_user_secrecy_rate.iter().sum(),
        per_user_sinr,
        per_user_eve_sinr,
        per_user_secrecy_rate,
    })
}
