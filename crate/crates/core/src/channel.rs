//! Geometry sampling and sparse multipath mmWave channels for a UAV base
//! station with a vertical ULA.
//!
//! Only elevation angles matter for a vertical array. Angles are measured from
//! the horizontal, positive looking down from the UAV. Path loss is applied in
//! the amplitude domain, `10^(PL_dB / 20)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub n_elements: usize,
    /// Element spacing over carrier wavelength.
    pub spacing_over_wavelength: f64,
}

impl ArrayGeometry {
    pub fn new(n_elements: usize, spacing_over_wavelength: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidInput("array needs at least one element".into()));
        }
        if !(spacing_over_wavelength > 0.0) || !spacing_over_wavelength.is_finite() {
            return Err(Error::InvalidInput(format!(
                "element spacing {spacing_over_wavelength} must be positive"
            )));
        }
        Ok(Self {
            n_elements,
            spacing_over_wavelength,
        })
    }

    /// Half-wavelength ULA.
    pub fn half_wavelength(n_elements: usize) -> Self {
        Self {
            n_elements,
            spacing_over_wavelength: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePlacement {
    pub horizontal_distance: f64,
    pub uav_altitude: f64,
    /// `atan(uav_altitude / horizontal_distance)`.
    pub los_angle: f64,
}

impl NodePlacement {
    pub fn new(horizontal_distance: f64, uav_altitude: f64) -> Self {
        Self {
            horizontal_distance,
            uav_altitude,
            los_angle: uav_altitude.atan2(horizontal_distance),
        }
    }

    pub fn los_distance(&self) -> f64 {
        self.horizontal_distance.hypot(self.uav_altitude)
    }
}

/// Per-path small-scale parameters of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathParams {
    pub gains: Vec<Complex64>,
    pub departure_angles: Vec<f64>,
    /// Empty for single-antenna receivers.
    pub arrival_angles: Vec<f64>,
}

impl MultipathParams {
    pub fn n_paths(&self) -> usize {
        self.gains.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `H = [h_1 ... h_K]`, `N x K`.
    pub users: CMatrix,
    /// `H_e`, `N x M`.
    pub eve: CMatrix,
    pub user_placements: Vec<NodePlacement>,
    pub eve_placement: NodePlacement,
    pub eve_los_angle: f64,
}

/// `a_N(theta)` with element `m` equal to `exp(-j 2 pi (d/lambda) m sin(theta)) / sqrt(N)`.
pub fn steering_vector(geometry: &ArrayGeometry, angle: f64) -> CVector {
    let n = geometry.n_elements;
    let amp = 1.0 / (n as f64).sqrt();
    let k = -2.0 * PI * geometry.spacing_over_wavelength * angle.sin();
    CVector::from_fn(n, |m, _| Complex64::from_polar(amp, k * m as f64))
}

/// Urban-micro LoS path loss in dB with the carrier given in GHz.
pub fn path_loss_db(horizontal_distance: f64, uav_altitude: f64, carrier_ghz: f64) -> Result<f64> {
    if horizontal_distance < 0.0 || uav_altitude < 0.0 {
        return Err(Error::InvalidInput("distances must be non-negative".into()));
    }
    let d_los = horizontal_distance.hypot(uav_altitude);
    if d_los == 0.0 {
        return Err(Error::InvalidInput("zero line-of-sight distance".into()));
    }
    if !(carrier_ghz > 0.0) {
        return Err(Error::InvalidInput(format!("carrier {carrier_ghz} GHz must be positive")));
    }
    Ok(32.4 + 21.0 * d_los.log10() + 20.0 * carrier_ghz.log10())
}

pub fn amplitude_loss(path_loss_db: f64) -> f64 {
    10f64.powf(path_loss_db / 20.0)
}

pub fn sample_placement<R: Rng + ?Sized>(rng: &mut R, config: &ScenarioConfig) -> NodePlacement {
    let u: f64 = rng.gen();
    let d = config.d_min + (config.d_max - config.d_min) * u;
    NodePlacement::new(d, config.uav_altitude)
}

/// Laplacian angles around `los_angle` whose standard deviation is
/// `spread_deg`, drawn by inverse CDF.
pub fn sample_angles<R: Rng + ?Sized>(
    rng: &mut R,
    los_angle: f64,
    spread_deg: f64,
    n_paths: usize,
) -> Vec<f64> {
    let scale = spread_deg.to_radians() / SQRT_2;
    (0..n_paths)
        .map(|_| {
            let u = loop {
                let u: f64 = rng.gen::<f64>() - 0.5;
                if u > -0.5 {
                    break u;
                }
            };
            los_angle - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
        })
        .collect()
}

pub fn sample_gains<R: Rng + ?Sized>(rng: &mut R, n_paths: usize) -> Vec<Complex64> {
    (0..n_paths)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) / SQRT_2
        })
        .collect()
}

/// `h = sqrt(N / L) * sum_l alpha_l / PL * a_N(theta_l)`.
pub fn user_channel(
    placement: &NodePlacement,
    multipath: &MultipathParams,
    geometry: &ArrayGeometry,
    carrier_ghz: f64,
) -> Result<CVector> {
    let pl = amplitude_loss(path_loss_db(
        placement.horizontal_distance,
        placement.uav_altitude,
        carrier_ghz,
    )?);
    let n_paths = multipath.n_paths();
    if n_paths == 0 || multipath.departure_angles.len() != n_paths {
        return Err(Error::InvalidInput("multipath needs one angle per gain and at least one path".into()));
    }
    let norm = (geometry.n_elements as f64 / n_paths as f64).sqrt();
    let mut h = CVector::zeros(geometry.n_elements);
    for (alpha, &theta) in multipath.gains.iter().zip(&multipath.departure_angles) {
        h += steering_vector(geometry, theta) * (alpha * (norm / pl));
    }
    Ok(h)
}

/// `H_e = sqrt(N M / L) * sum_l alpha_l / PL * a_N(theta_l) a_M(psi_l)^H`.
pub fn eve_channel(
    placement: &NodePlacement,
    multipath: &MultipathParams,
    bs_geometry: &ArrayGeometry,
    eve_geometry: &ArrayGeometry,
    carrier_ghz: f64,
) -> Result<CMatrix> {
    let pl = amplitude_loss(path_loss_db(
        placement.horizontal_distance,
        placement.uav_altitude,
        carrier_ghz,
    )?);
    let n_paths = multipath.n_paths();
    if n_paths == 0
        || multipath.departure_angles.len() != n_paths
        || multipath.arrival_angles.len() != n_paths
    {
        return Err(Error::InvalidInput("eve multipath needs matching gains, AoDs and AoAs".into()));
    }
    let norm = ((bs_geometry.n_elements * eve_geometry.n_elements) as f64 / n_paths as f64).sqrt();
    let mut h = CMatrix::zeros(bs_geometry.n_elements, eve_geometry.n_elements);
    for ((alpha, &theta), &psi) in multipath
        .gains
        .iter()
        .zip(&multipath.departure_angles)
        .zip(&multipath.arrival_angles)
    {
        let a = steering_vector(bs_geometry, theta);
        let b = steering_vector(eve_geometry, psi);
        h += (a * (alpha * (norm / pl))) * b.adjoint();
    }
    Ok(h)
}

/// RNG for one Monte Carlo trial: the seed keys the generator and the trial
/// index selects an independent ChaCha stream.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Draws users and eavesdropper and synthesizes both channels.
///
/// Draw order is fixed (users in index order, then Eve) so a given RNG state
/// always yields the same realization.
pub fn draw_realization<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ScenarioConfig,
) -> Result<ChannelRealization> {
    let bs = ArrayGeometry::new(config.n_bs_antennas, config.antenna_spacing)?;
    let eve_array = ArrayGeometry::new(config.n_eve_antennas, config.antenna_spacing)?;
    let (n_paths, spread) = (config.n_paths, config.angle_spread_deg);

    let mut users = CMatrix::zeros(config.n_bs_antennas, config.n_users);
    let mut user_placements = Vec::with_capacity(config.n_users);
    for k in 0..config.n_users {
        let placement = sample_placement(rng, config);
        let departure_angles = sample_angles(rng, placement.los_angle, spread, n_paths);
        let gains = sample_gains(rng, n_paths);
        let mp = MultipathParams {
            gains,
            departure_angles,
            arrival_angles: Vec::new(),
        };
        users.set_column(k, &user_channel(&placement, &mp, &bs, config.carrier_ghz)?);
        user_placements.push(placement);
    }

    let eve_placement = sample_placement(rng, config);
    let departure_angles = sample_angles(rng, eve_placement.los_angle, spread, n_paths);
    // arrival reference elevation is drawn from an independent placement
    let arrival_reference = sample_placement(rng, config).los_angle;
    let arrival_angles = sample_angles(rng, arrival_reference, spread, n_paths);
    let gains = sample_gains(rng, n_paths);
    let mp = MultipathParams {
        gains,
        departure_angles,
        arrival_angles,
    };
    let eve = eve_channel(&eve_placement, &mp, &bs, &eve_array, config.carrier_ghz)?;

    Ok(ChannelRealization {
        users,
        eve,
        user_placements,
        eve_los_angle: eve_placement.los_angle,
        eve_placement,
    })
}
