use crate::error::{Error, Result};

/// Round-trip times from the user to each node of a path, and the per-node
/// miss probability of one object. The last node is the repository.
#[derive(Debug, Clone, PartialEq)]
pub struct PathModel {
    rtts: Vec<f64>,
    miss_probs: Vec<f64>,
}

impl PathModel {
    pub fn new(rtts: Vec<f64>, miss_probs: Vec<f64>) -> Result<Self> {
        if rtts.is_empty() || rtts.len() != miss_probs.len() {
            return Err(Error::PathModel("rtts and miss probabilities must be non-empty and of equal length".into()));
        }
        if miss_probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::PathModel("miss probabilities must lie in [0, 1]".into()));
        }
        if rtts.iter().any(|r| !(*r >= 0.0)) || rtts.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::PathModel("rtts must be non-negative and non-decreasing along the path".into()));
        }
        let path = Self { rtts, miss_probs };
        let total: f64 = path.first_hit_weights().iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::PathModel(format!(
                "first-hit probabilities sum to {total}; the repository must never miss"
            )));
        }
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.rtts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rtts.is_empty()
    }

    /// Probability that node `i` is the first to hold the object.
    pub fn first_hit_weights(&self) -> Vec<f64> {
        let mut reach = 1.0;
        self.miss_probs
            .iter()
            .map(|m| {
                let w = reach * (1.0 - m);
                reach *= m;
                w
            })
            .collect()
    }

    pub fn vrtt(&self) -> f64 {
        self.rvrtt(1).expect("node 1 always exists")
    }

    /// Residual expected latency seen from node `l` (1-based).
    pub fn rvrtt(&self, l: usize) -> Result<f64> {
        if l == 0 || l > self.len() {
            return Err(Error::PathModel(format!("node index {l} outside 1..={}", self.len())));
        }
        Ok(self
            .first_hit_weights()
            .iter()
            .zip(&self.rtts)
            .skip(l - 1)
            .map(|(w, r)| w * r)
            .sum())
    }
}
