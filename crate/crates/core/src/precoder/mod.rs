//! Precoder designs and the shared power-split normalization.

pub mod conventional;
pub mod eveaware;
pub mod socp;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// Identifier of a complete data + artificial-noise precoding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ZfConv,
    RzfConv,
    ZfEveFull,
    RzfEveFull,
    ZfEveLimited,
    RzfEveLimited,
    NonlinearSocp,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::ZfConv,
        Scheme::RzfConv,
        Scheme::ZfEveFull,
        Scheme::RzfEveFull,
        Scheme::ZfEveLimited,
        Scheme::RzfEveLimited,
        Scheme::NonlinearSocp,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scheme::ZfConv => "zf_conv",
            Scheme::RzfConv => "rzf_conv",
            Scheme::ZfEveFull => "zf_eve_full",
            Scheme::RzfEveFull => "rzf_eve_full",
            Scheme::ZfEveLimited => "zf_eve_limited",
            Scheme::RzfEveLimited => "rzf_eve_limited",
            Scheme::NonlinearSocp => "nonlinear_socp",
        }
    }

    /// True for schemes whose data precoder is plain or virtual zero forcing.
    pub fn is_zf(self) -> bool {
        matches!(self, Scheme::ZfConv | Scheme::ZfEveFull | Scheme::ZfEveLimited)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.id() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown scheme `{s}`")))
    }
}

/// Linear precoder family used for the (possibly virtual) channel inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearVariant {
    Zf,
    Rzf,
}

/// Normalized data precoders `W` (N x K) and AN precoders `V` (N x Z).
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    pub data: CMatrix,
    pub an: CMatrix,
    pub phi: f64,
    pub scheme: Scheme,
    /// Set when the requested design failed and a baseline was substituted.
    pub fallback: bool,
}

impl PrecoderSet {
    pub fn n_users(&self) -> usize {
        self.data.ncols()
    }

    pub fn data_power(&self) -> f64 {
        self.data.norm_squared()
    }

    pub fn an_power(&self) -> f64 {
        self.an.norm_squared()
    }
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&phi) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("power splitting factor {phi} outside [0, 1]")))
    }
}

fn scale_columns(m: &CMatrix, budget: f64, col_offset: usize) -> Result<CMatrix> {
    let count = m.ncols();
    let mut out = m.clone();
    if count == 0 {
        return Ok(out);
    }
    for (j, mut col) in out.column_iter_mut().enumerate() {
        if budget == 0.0 {
            col.fill(Complex64::new(0.0, 0.0));
            continue;
        }
        let energy = col.norm_squared();
        if energy == 0.0 || !energy.is_finite() {
            return Err(Error::DegeneratePrecoder { column: col_offset + j });
        }
        col *= Complex64::new((budget / (count as f64 * energy)).sqrt(), 0.0);
    }
    Ok(out)
}

/// Uniform power allocation: every data column gets `phi / K`, every AN
/// column `(1 - phi) / Z`. With `Z = 0` the AN budget is left unused.
pub fn normalize(
    data: &CMatrix,
    an: &CMatrix,
    phi: f64,
    scheme: Scheme,
) -> Result<PrecoderSet> {
    check_phi(phi)?;
    if an.ncols() > 0 && an.nrows() != data.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "data precoders have {} rows, AN precoders {}",
            data.nrows(),
            an.nrows()
        )));
    }
    Ok(PrecoderSet {
        data: scale_columns(data, phi, 0)?,
        an: scale_columns(an, 1.0 - phi, data.ncols())?,
        phi,
        scheme,
        fallback: false,
    })
}
