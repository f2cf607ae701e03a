//! Latency-aware caching (LAC) for information-centric networks.
//!
//! - [`workload`]: Zipf popularity and Poisson request streams.
//! - [`cache`]: LRU list, admission policies and the per-node latency estimator.
//! - [`netsim`]: deterministic discrete-event simulator of cache trees.
//! - [`analytics`]: characteristic-time miss models and related closed forms.
//! - [`metrics`]: per-rank miss counters, delivery-time series, link loads, CSV export.
//! - [`experiment`]: model-vs-simulation comparison and LCP calibration.

pub mod analytics;
pub mod cache;
mod error;
pub mod experiment;
pub mod metrics;
pub mod netsim;
pub mod workload;

pub use error::{Error, Result};
