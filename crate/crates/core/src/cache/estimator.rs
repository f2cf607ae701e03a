use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Per-node latency bookkeeping for latency-aware admission.
///
/// `mean` is the cumulative mean of the retrieval latencies of every object
/// this node has ever admitted. `inflight` holds the forward timestamps of
/// interests still waiting for data, matched FIFO per object.
#[derive(Debug, Clone, Default)]
pub struct LatencyEstimator {
    mean: f64,
    count: u64,
    inflight: HashMap<u32, VecDeque<f64>>,
}

impl LatencyEstimator {
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn record_forward(&mut self, rank: u32, now: f64) {
        self.inflight.entry(rank).or_default().push_back(now);
    }

    /// Elapsed time since the oldest outstanding forward of `rank`.
    pub fn measure_delta_t(&mut self, rank: u32, now: f64) -> Result<f64> {
        let queue = self
            .inflight
            .get_mut(&rank)
            .ok_or(Error::MissingForward { rank })?;
        let sent = queue.pop_front().ok_or(Error::MissingForward { rank })?;
        if queue.is_empty() {
            self.inflight.remove(&rank);
        }
        Ok(now - sent)
    }

    pub fn pending(&self, rank: u32) -> usize {
        self.inflight.get(&rank).map_or(0, VecDeque::len)
    }

    /// Folds an admitted object's latency into the running mean.
    pub fn update(&mut self, delta_t: f64) {
        let m = self.count as f64;
        self.mean = (self.mean * m + delta_t) / (m + 1.0);
        self.count += 1;
    }
}

/// Mean of the per-packet latencies of one object retrieval.
#[derive(Debug, Clone, Copy, Default)]
pub struct ObjectLatency {
    sum: f64,
    packets: u32,
}

impl ObjectLatency {
    pub fn push(&mut self, delta_t: f64) {
        self.sum += delta_t;
        self.packets += 1;
    }

    pub fn packets(&self) -> u32 {
        self.packets
    }

    pub fn mean(&self) -> Option<f64> {
        (self.packets > 0).then(|| self.sum / self.packets as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_packet_delta() {
        let mut est = LatencyEstimator::default();
        est.record_forward(4, 1.0);
        assert_eq!(est.measure_delta_t(4, 3.5).unwrap(), 2.5);
        assert_eq!(est.pending(4), 0);
    }

    #[test]
    fn multi_packet_object_mean() {
        let mut est = LatencyEstimator::default();
        est.record_forward(9, 0.0);
        est.record_forward(9, 0.0);
        let mut obj = ObjectLatency::default();
        obj.push(est.measure_delta_t(9, 2.0).unwrap());
        obj.push(est.measure_delta_t(9, 4.0).unwrap());
        assert_eq!(obj.mean(), Some(3.0));
        assert_eq!(ObjectLatency::default().mean(), None);
    }

    #[test]
    fn fifo_matching_per_rank() {
        let mut est = LatencyEstimator::default();
        est.record_forward(1, 0.0);
        est.record_forward(2, 0.5);
        est.record_forward(1, 1.0);
        assert_eq!(est.measure_delta_t(1, 2.0).unwrap(), 2.0);
        assert_eq!(est.measure_delta_t(1, 2.0).unwrap(), 1.0);
        assert_eq!(est.measure_delta_t(2, 2.0).unwrap(), 1.5);
    }

    #[test]
    fn data_without_forward_is_an_error() {
        let mut est = LatencyEstimator::default();
        assert!(matches!(est.measure_delta_t(7, 1.0), Err(Error::MissingForward { rank: 7 })));
        est.record_forward(7, 0.0);
        est.measure_delta_t(7, 1.0).unwrap();
        assert!(est.measure_delta_t(7, 1.0).is_err());
    }

    #[test]
    fn running_mean_examples() {
        let mut est = LatencyEstimator::default();
        est.update(0.4);
        assert_eq!((est.mean(), est.count()), (0.4, 1));

        let mut est = LatencyEstimator::default();
        est.update(1.0);
        est.update(2.0);
        assert_eq!((est.mean(), est.count()), (1.5, 2));
        est.update(1.5);
        assert_eq!((est.mean(), est.count()), (1.5, 3));
    }

    proptest! {
        #[test]
        fn mean_matches_log_recomputation(samples in prop::collection::vec(0.0f64..50.0, 1..2000)) {
            let mut est = LatencyEstimator::default();
            for &s in &samples {
                est.update(s);
            }
            let exact = samples.iter().sum::<f64>() / samples.len() as f64;
            prop_assert!((est.mean() - exact).abs() <= 1e-9 * exact.max(1.0));
            prop_assert_eq!(est.count(), samples.len() as u64);
        }
    }
}
