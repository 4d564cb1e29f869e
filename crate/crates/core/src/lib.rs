//! Secrecy-aware downlink precoding for a multi-antenna UAV base station in
//! mmWave bands, with a Monte Carlo harness that sweeps the data/AN power
//! split for every scheme.

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod output;
pub mod plot;
pub mod precoder;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use precoder::{PrecoderSet, Scheme};
