use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::estimator::LatencyEstimator;
use crate::error::{domain, Error, Result};

/// How a cache decides whether a retrieved object is admitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Admission {
    /// Plain LRU: every retrieved object is stored.
    Always,
    /// Leave-copy-probabilistically with a constant probability.
    Fixed { p: f64 },
    /// Probability `min(ΔT^β / f^γ, 1)` driven by the measured retrieval latency.
    LatencyAware { beta: f64, gamma: f64 },
}

/// Whether the stochastic move-to-front decision also applies to hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MtfMode {
    /// Decision on misses only; hits always move to front.
    #[default]
    Asymmetric,
    /// Same decision law on hits and misses.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionPolicy {
    #[serde(flatten)]
    pub admission: Admission,
    #[serde(default)]
    pub mtf: MtfMode,
}

/// Outcome of one stochastic caching (or MTF) decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub admit: bool,
    pub prob: f64,
}

impl InsertionPolicy {
    pub fn lru() -> Self {
        Self {
            admission: Admission::Always,
            mtf: MtfMode::Asymmetric,
        }
    }

    pub fn lcp(p: f64) -> Self {
        Self {
            admission: Admission::Fixed { p },
            mtf: MtfMode::Asymmetric,
        }
    }

    pub fn sym(p: f64) -> Self {
        Self {
            admission: Admission::Fixed { p },
            mtf: MtfMode::Symmetric,
        }
    }

    /// LAC proper: latency-aware insertion, deterministic LRU on hits.
    pub fn lac(beta: f64, gamma: f64) -> Self {
        Self {
            admission: Admission::LatencyAware { beta, gamma },
            mtf: MtfMode::Asymmetric,
        }
    }

    /// Latency-aware decision applied to hits as well.
    pub fn la_sym(beta: f64, gamma: f64) -> Self {
        Self {
            admission: Admission::LatencyAware { beta, gamma },
            mtf: MtfMode::Symmetric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.admission {
            Admission::Always => Ok(()),
            Admission::Fixed { p } if (0.0..=1.0).contains(&p) => Ok(()),
            Admission::Fixed { p } => Err(domain(format!("probability {p} outside [0, 1]"))),
            Admission::LatencyAware { beta, gamma } => {
                if beta >= 0.0 && gamma >= 0.0 && beta.is_finite() && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(domain(format!("beta={beta}, gamma={gamma} must be non-negative")))
                }
            }
        }
    }

    pub fn is_latency_aware(&self) -> bool {
        matches!(self.admission, Admission::LatencyAware { .. })
    }
}

impl fmt::Display for InsertionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.admission, self.mtf) {
            (Admission::Always, _) => write!(f, "lru"),
            (Admission::Fixed { p }, MtfMode::Asymmetric) => write!(f, "lcp:{p}"),
            (Admission::Fixed { p }, MtfMode::Symmetric) => write!(f, "sym:{p}"),
            (Admission::LatencyAware { beta, gamma }, MtfMode::Asymmetric) => {
                write!(f, "lac:{beta},{gamma}")
            }
            (Admission::LatencyAware { beta, gamma }, MtfMode::Symmetric) => {
                write!(f, "sym-la:{beta},{gamma}")
            }
        }
    }
}

/// Draws the caching decision for an object retrieved with latency `delta_t`.
///
/// `Always` consumes no randomness; every other kind consumes one uniform.
/// Before the estimator holds any sample the latency-aware rule admits with
/// probability one, which seeds the running mean.
pub fn decide_insertion<R: Rng + ?Sized>(
    admission: &Admission,
    delta_t: f64,
    est: &LatencyEstimator,
    rng: &mut R,
) -> Result<Decision> {
    let prob = match *admission {
        Admission::Always => return Ok(Decision { admit: true, prob: 1.0 }),
        Admission::Fixed { p } => p,
        Admission::LatencyAware { beta, gamma } => latency_aware_prob(beta, gamma, delta_t, est)?,
    };
    let u: f64 = rng.random();
    Ok(Decision {
        admit: u < prob,
        prob,
    })
}

pub fn latency_aware_prob(beta: f64, gamma: f64, delta_t: f64, est: &LatencyEstimator) -> Result<f64> {
    if est.count() == 0 {
        return Ok(1.0);
    }
    let f = est.mean();
    if f <= 0.0 {
        return Err(Error::EstimatorState { count: est.count() });
    }
    let p = delta_t.max(0.0).powf(beta) / f.powf(gamma);
    Ok(if p.is_nan() { 1.0 } else { p.min(1.0) })
}
