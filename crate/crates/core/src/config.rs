//! Scenario configuration and its TOML file format.
//!
//! Every key is optional; absent keys take the reference simulation values
//! (16-antenna UAV at 100 m, 4-antenna eavesdropper, 28 GHz, 100 MHz, ...).
//! Unknown keys are rejected.
//!
//! ```toml
//! n_bs_antennas = 16
//! n_eve_antennas = 4
//! n_users = 4
//! d_min = 10.0
//! d_max = 100.0
//! uav_altitude = 100.0
//! carrier_ghz = 28.0
//! bandwidth_hz = 1e8
//! noise_figure_db = 9.0
//! thermal_noise_dbm_hz = -174.0
//! tx_power_dbm = 30.0
//! antenna_spacing = 0.5
//! n_paths = 5
//! angle_spread_deg = 10.0
//! phi_grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
//! n_trials = 500
//! seed = 20200901
//! schemes = ["zf_conv", "rzf_conv", "zf_eve_full", "rzf_eve_full",
//!            "zf_eve_limited", "rzf_eve_limited", "nonlinear_socp"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precoder::Scheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_bs_antennas: usize,
    pub n_eve_antennas: usize,
    pub n_users: usize,
    /// Horizontal ground distance range, meters.
    pub d_min: f64,
    pub d_max: f64,
    pub uav_altitude: f64,
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub thermal_noise_dbm_hz: f64,
    pub tx_power_dbm: f64,
    /// Element spacing in wavelengths.
    pub antenna_spacing: f64,
    pub n_paths: usize,
    pub angle_spread_deg: f64,
    pub phi_grid: Vec<f64>,
    pub n_trials: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
}

pub const DEFAULT_SEED: u64 = 20200901;

pub fn default_phi_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_bs_antennas: 16,
            n_eve_antennas: 4,
            n_users: 4,
            d_min: 10.0,
            d_max: 100.0,
            uav_altitude: 100.0,
            carrier_ghz: 28.0,
            bandwidth_hz: 100e6,
            noise_figure_db: 9.0,
            thermal_noise_dbm_hz: -174.0,
            tx_power_dbm: 30.0,
            antenna_spacing: 0.5,
            n_paths: 5,
            angle_spread_deg: 10.0,
            phi_grid: default_phi_grid(),
            n_trials: 500,
            seed: DEFAULT_SEED,
            schemes: Scheme::ALL.to_vec(),
        }
    }
}

fn range_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("n_bs_antennas", self.n_bs_antennas),
            ("n_eve_antennas", self.n_eve_antennas),
            ("n_users", self.n_users),
            ("n_paths", self.n_paths),
            ("n_trials", self.n_trials),
        ] {
            if v == 0 {
                return Err(range_err(key, "must be at least 1"));
            }
        }
        let finite = [
            ("d_min", self.d_min),
            ("d_max", self.d_max),
            ("uav_altitude", self.uav_altitude),
            ("carrier_ghz", self.carrier_ghz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_figure_db", self.noise_figure_db),
            ("thermal_noise_dbm_hz", self.thermal_noise_dbm_hz),
            ("tx_power_dbm", self.tx_power_dbm),
            ("antenna_spacing", self.antenna_spacing),
            ("angle_spread_deg", self.angle_spread_deg),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(range_err(key, "must be finite"));
            }
        }
        if self.d_min < 0.0 {
            return Err(range_err("d_min", "must be >= 0"));
        }
        if self.d_max < self.d_min {
            return Err(range_err("d_max", format!("must be >= d_min ({})", self.d_min)));
        }
        if self.uav_altitude < 0.0 {
            return Err(range_err("uav_altitude", "must be >= 0"));
        }
        if self.uav_altitude == 0.0 && self.d_min == 0.0 {
            return Err(range_err("d_min", "zero line-of-sight distance is possible with uav_altitude = 0"));
        }
        for (key, v) in [
            ("carrier_ghz", self.carrier_ghz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("antenna_spacing", self.antenna_spacing),
        ] {
            if v <= 0.0 {
                return Err(range_err(key, "must be > 0"));
            }
        }
        if self.angle_spread_deg < 0.0 {
            return Err(range_err("angle_spread_deg", "must be >= 0"));
        }
        if self.phi_grid.is_empty() {
            return Err(range_err("phi_grid", "must not be empty"));
        }
        if let Some((i, phi)) = self
            .phi_grid
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(range_err(&format!("phi_grid[{i}]"), format!("{phi} is outside [0, 1]")));
        }
        if self.schemes.is_empty() {
            return Err(range_err("schemes", "must not be empty"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(range_err(&format!("schemes[{i}]"), format!("duplicate scheme `{s}`")));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<config>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

/// Reads and validates a TOML scenario file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ScenarioConfig::from_toml_str(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_defaults() {
        let cfg = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.n_users, 4);
        assert_eq!(cfg.n_bs_antennas, 16);
        assert_eq!(cfg.n_eve_antennas, 4);
        assert_eq!(cfg.n_paths, 5);
        assert_eq!(cfg.tx_power_dbm, 30.0);
        assert_eq!(cfg.carrier_ghz, 28.0);
        assert_eq!(cfg.phi_grid.len(), 11);
    }

    #[test]
    fn zero_users_names_the_key() {
        let err = ScenarioConfig::from_toml_str("n_users = 0").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "n_users"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_phi_names_the_index() {
        let err = ScenarioConfig::from_toml_str("phi_grid = [0.5, 1.2]").unwrap_err();
        assert!(err.to_string().contains("phi_grid[1]"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ScenarioConfig::from_toml_str("n_user = 3").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(err.to_string().contains("n_user"), "{err}");
    }

    #[test]
    fn malformed_value_rejected() {
        assert!(ScenarioConfig::from_toml_str("n_users = \"four\"").is_err());
        assert!(ScenarioConfig::from_toml_str("schemes = [\"mmse\"]").is_err());
        assert!(ScenarioConfig::from_toml_str("d_min = 50.0\nd_max = 20.0").is_err());
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = ScenarioConfig::default();
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn parse_from_file_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "n_users = [").unwrap();
        let err = parse_config(&path).unwrap_err();
        assert!(err.to_string().contains("bad.toml"), "{err}");

        std::fs::write(&path, "n_users = 8\nseed = 7").unwrap();
        let cfg = parse_config(&path).unwrap();
        assert_eq!((cfg.n_users, cfg.seed), (8, 7));
    }
}
