//! Request process: Zipf popularity over a fixed catalog and per-user Poisson
//! arrivals under the independent reference model.
//!
//! Every user owns its own random stream. Streams are ChaCha8 generators keyed
//! by the scenario seed and selected by stream id (the node id), so adding a
//! user never shifts the draws seen by another one.

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};

/// Independent random stream `stream` of the scenario keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Zipf(α) popularity law `q(k) = c / k^α` over ranks `1..=N`.
#[derive(Debug, Clone)]
pub struct PopularityModel {
    alpha: f64,
    weights: Vec<f64>,
    cdf: Vec<f64>,
    norm_c: f64,
}

/// Builds the normalized Zipf weights for a catalog of `n` objects.
pub fn zipf_weights(n: usize, alpha: f64) -> Result<PopularityModel> {
    if n == 0 {
        return Err(domain("catalog size must be at least 1"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(domain(format!("zipf exponent must be positive, got {alpha}")));
    }
    let raw: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-alpha)).collect();
    Ok(PopularityModel::normalize(alpha, raw))
}

impl PopularityModel {
    /// Popularity law from arbitrary non-negative weights, rank 1 first.
    /// [`alpha`](Self::alpha) reports 0 for such models.
    pub fn from_weights(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(domain("catalog size must be at least 1"));
        }
        if raw.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || !raw.iter().any(|w| *w > 0.0) {
            return Err(domain("weights must be finite, non-negative and not all zero"));
        }
        Ok(Self::normalize(0.0, raw))
    }

    fn normalize(alpha: f64, raw: Vec<f64>) -> Self {
        // smallest terms first keeps the tail from being swallowed by rounding
        let total: f64 = raw.iter().rev().sum();
        let norm_c = 1.0 / total;
        let weights: Vec<f64> = raw.iter().map(|w| w * norm_c).collect();

        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cdf.push(acc);
        }
        *cdf.last_mut().expect("non-empty catalog") = 1.0;

        PopularityModel {
            alpha,
            weights,
            cdf,
            norm_c,
        }
    }
}

impl PopularityModel {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn catalog_size(&self) -> usize {
        self.weights.len()
    }

    /// Normalization constant `c = 1 / Σ i^-α`.
    pub fn norm_c(&self) -> f64 {
        self.norm_c
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Popularity of `rank` (1-based). Ranks outside the catalog have zero mass.
    pub fn q(&self, rank: u32) -> f64 {
        match rank {
            0 => 0.0,
            r => self.weights.get(r as usize - 1).copied().unwrap_or(0.0),
        }
    }

    /// Inverse-CDF lookup of a uniform draw `u ∈ [0, 1)`.
    pub fn rank_for_uniform(&self, u: f64) -> u32 {
        let idx = self.cdf.partition_point(|&c| c <= u);
        (idx.min(self.cdf.len() - 1) + 1) as u32
    }

    /// Draws a rank with probability `q(k)`, consuming exactly one uniform.
    pub fn sample_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        self.rank_for_uniform(u)
    }
}

/// Exponential inter-arrival by inverse transform of `u ∈ (0, 1)`.
pub fn exp_interarrival(rate: f64, u: f64) -> f64 {
    -u.ln() / rate
}

/// Poisson request generator of one user population.
#[derive(Debug, Clone)]
pub struct RequestSource {
    rate: f64,
    user_id: u64,
    rng: ChaCha8Rng,
}

impl RequestSource {
    pub fn new(rate: f64, seed: u64, user_id: u64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(domain(format!("request rate must be positive, got {rate}")));
        }
        Ok(Self {
            rate,
            user_id,
            rng: stream_rng(seed, user_id),
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn user_id(&self) -> u64 {
        self.user_id
    }

    /// Seconds until the next request; always strictly positive.
    pub fn next_interarrival(&mut self) -> f64 {
        let u: f64 = Open01.sample(&mut self.rng);
        exp_interarrival(self.rate, u)
    }

    /// Next `(inter-arrival, rank)` pair of this user's stream.
    pub fn next_request(&mut self, model: &PopularityModel) -> (f64, u32) {
        let dt = self.next_interarrival();
        (dt, model.sample_rank(&mut self.rng))
    }
}
