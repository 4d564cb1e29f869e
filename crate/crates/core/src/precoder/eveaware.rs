//! Linear precoders that treat the eavesdropper as one more "user" of a
//! virtual channel `G = [H d]`.
//!
//! `d` is either the dominant UAV-side direction of the full eavesdropper
//! channel or, with only location knowledge, the LoS steering vector. The
//! virtual ZF / RZF solution is split into `K` data columns and one AN column
//! that points at the eavesdropper while staying clear of the users.

use super::conventional::{rzf_data, zf_data};
use super::{check_phi, normalize, LinearVariant, PrecoderSet, Scheme};
use crate::channel::{steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::numerics::{svd, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveCsi {
    Full,
    Limited,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EveDirection {
    pub direction: CVector,
    pub mode: EveCsi,
}

/// Principal left singular vector of `H_e` (the transmit-side direction that
/// maximizes `||H_e^H x||`), with the canonical SVD phase.
pub fn dominant_eve_direction(h_e: &CMatrix) -> Result<EveDirection> {
    let dec = svd(h_e)?;
    if dec.rank == 0 {
        return Err(Error::DegenerateChannel("eavesdropper channel is zero".into()));
    }
    Ok(EveDirection {
        direction: dec.left_vectors.column(0).into_owned(),
        mode: EveCsi::Full,
    })
}

/// Location-only knowledge: the steering vector toward Eve's LoS elevation.
pub fn limited_eve_direction(geometry: &ArrayGeometry, eve_los_angle: f64) -> EveDirection {
    EveDirection {
        direction: steering_vector(geometry, eve_los_angle),
        mode: EveCsi::Limited,
    }
}

pub fn scheme_for(variant: LinearVariant, mode: EveCsi) -> Scheme {
    match (variant, mode) {
        (LinearVariant::Zf, EveCsi::Full) => Scheme::ZfEveFull,
        (LinearVariant::Rzf, EveCsi::Full) => Scheme::RzfEveFull,
        (LinearVariant::Zf, EveCsi::Limited) => Scheme::ZfEveLimited,
        (LinearVariant::Rzf, EveCsi::Limited) => Scheme::RzfEveLimited,
    }
}

/// Unnormalized `(W~, v~)` from the virtual channel.
pub fn eveaware_unnormalized(
    h: &CMatrix,
    eve_dir: &EveDirection,
    variant: LinearVariant,
    beta: f64,
) -> Result<(CMatrix, CMatrix)> {
    let (n, k) = h.shape();
    if eve_dir.direction.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "eve direction has length {}, channel has {n} rows",
            eve_dir.direction.len()
        )));
    }
    let mut g = CMatrix::zeros(n, k + 1);
    g.columns_mut(0, k).copy_from(h);
    g.set_column(k, &eve_dir.direction);
    let f = match variant {
        LinearVariant::Zf => zf_data(&g)?,
        LinearVariant::Rzf => rzf_data(&g, beta)?,
    };
    Ok((f.columns(0, k).into_owned(), f.columns(k, 1).into_owned()))
}

pub fn eveaware_precoders(
    h: &CMatrix,
    eve_dir: &EveDirection,
    variant: LinearVariant,
    beta: f64,
    phi: f64,
) -> Result<PrecoderSet> {
    check_phi(phi)?;
    let (data, an) = eveaware_unnormalized(h, eve_dir, variant, beta)?;
    normalize(&data, &an, phi, scheme_for(variant, eve_dir.mode))
}

/// `|<a, b>|` for unit vectors; 1 means same direction up to phase.
pub fn direction_overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm() / (a.norm() * b.norm())
}
