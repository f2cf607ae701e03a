//! Characteristic-time model of an LRU cache with probabilistic insertion.

use super::clamp_prob;
use crate::error::{domain, Result};
use crate::workload::PopularityModel;

const TAU_TOL: f64 = 1e-9;
const MAX_ITER: u32 = 200;

/// Probability of at least one Poisson(λ_k) arrival within `tau`.
pub fn phi(lambda_k: f64, tau: f64) -> f64 {
    clamp_prob(-(-lambda_k * tau).exp_m1())
}

/// Move-to-front probability given miss probability `pi`, insertion
/// probability `p` and request probability `phi`.
pub fn mtf_prob(pi: f64, p: f64, phi: f64) -> f64 {
    clamp_prob((1.0 - (1.0 - p) * pi) * phi)
}

/// Steady-state miss probability of a rank requested at rate `lambda_k`
/// when insertions succeed with mean probability `mean_p`.
pub fn miss_asym(lambda_k: f64, tau: f64, mean_p: f64) -> f64 {
    let stay = (-lambda_k * tau).exp();
    clamp_prob(stay / (1.0 - (1.0 - stay) * (1.0 - mean_p)))
}

/// Discrete law of the per-object insertion probability.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionDistribution {
    support: Vec<f64>,
    masses: Vec<f64>,
}

impl DecisionDistribution {
    pub fn new(support: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != masses.len() {
            return Err(domain("support and masses must be non-empty and of equal length"));
        }
        if support.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(domain("support values must lie in [0, 1]"));
        }
        if masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(domain("masses must be non-negative"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(domain(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { support, masses })
    }

    pub fn point(u: f64) -> Result<Self> {
        Self::new(vec![u], vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.masses).map(|(u, m)| u * m).sum()
    }
}

/// Mixture miss probability `Σ_u P[p = u] (1 − φ) / (1 − φ (1 − u))`.
pub fn miss_mixture(dist: &DecisionDistribution, phi: f64) -> f64 {
    let sum = dist
        .support
        .iter()
        .zip(&dist.masses)
        .map(|(u, m)| m * (1.0 - phi) / (1.0 - phi * (1.0 - u)))
        .sum();
    clamp_prob(sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheSolution {
    pub tau_x: f64,
    /// Expected occupancy at `tau_x` minus the cache size.
    pub residual: f64,
    pub iterations: u32,
}

/// Expected number of cached objects at characteristic time `tau`.
pub fn expected_occupancy(tau: f64, lambda: f64, model: &PopularityModel, mean_p: f64) -> f64 {
    model
        .weights()
        .iter()
        .map(|q| 1.0 - miss_asym(lambda * q, tau, mean_p))
        .sum()
}

/// Solves `Σ_k (1 − π_k(τ)) = x` for τ by bisection.
pub fn solve_tau(x: usize, lambda: f64, model: &PopularityModel, mean_p: f64) -> Result<CheSolution> {
    let n = model.catalog_size();
    if x == 0 || x >= n {
        return Err(domain(format!("cache size {x} must satisfy 1 <= x < N = {n}")));
    }
    if !(mean_p > 0.0 && mean_p <= 1.0) {
        return Err(domain(format!("mean insertion probability {mean_p} outside (0, 1]")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("request rate {lambda} must be positive")));
    }
    let target = x as f64;
    let g = |tau: f64| expected_occupancy(tau, lambda, model, mean_p) - target;

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut grow = 0;
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 1100 || !hi.is_finite() {
            return Err(domain("no finite characteristic time brackets the cache size"));
        }
    }
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return Err(domain("bisection bracket lacks a sign change"));
    }

    let mut iterations = 0;
    while hi - lo > TAU_TOL && iterations < MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let tau_x = 0.5 * (lo + hi);
    Ok(CheSolution {
        tau_x,
        residual: g(tau_x),
        iterations,
    })
}
