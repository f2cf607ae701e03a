//! Cache engine: LRU ordering, admission policies and the latency estimator.

mod estimator;
mod lru;
mod policy;

pub use estimator::{LatencyEstimator, ObjectLatency};
pub use lru::{Lookup, LruCache};
pub use policy::{decide_insertion, latency_aware_prob, Admission, Decision, InsertionPolicy, MtfMode};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{stream_rng, zipf_weights};

    /// Runs a request sequence through a cache whose every miss is retrieved
    /// with latency `latency(rank)`; returns the hit/miss trace.
    fn trace(policy: InsertionPolicy, seq: &[u32], latency: impl Fn(u32) -> f64, seed: u64) -> Vec<bool> {
        let mut cache = LruCache::new(8);
        let mut est = LatencyEstimator::default();
        let mut rng = stream_rng(seed, 0);
        seq.iter()
            .map(|&r| {
                let hit = cache.lookup(r, &policy, &est, &mut rng).unwrap().is_hit();
                if !hit {
                    let dt = latency(r);
                    let d = decide_insertion(&policy.admission, dt, &est, &mut rng).unwrap();
                    if d.admit {
                        cache.insert(r, dt).unwrap();
                        est.update(dt);
                    }
                }
                hit
            })
            .collect()
    }

    fn zipf_sequence(len: usize) -> Vec<u32> {
        let m = zipf_weights(200, 0.9).unwrap();
        let mut rng = stream_rng(11, 0);
        (0..len).map(|_| m.sample_rank(&mut rng)).collect()
    }

    #[test]
    fn degenerate_policies_reduce_to_lru() {
        let seq = zipf_sequence(20_000);
        let lru = trace(InsertionPolicy::lru(), &seq, |_| 1.0, 1);
        assert_eq!(lru, trace(InsertionPolicy::lcp(1.0), &seq, |_| 1.0, 2));
        assert_eq!(lru, trace(InsertionPolicy::sym(1.0), &seq, |_| 1.0, 3));
        // constant latency equal to the running mean gives probability one
        assert_eq!(lru, trace(InsertionPolicy::lac(4.0, 4.0), &seq, |_| 1.7, 4));
        assert_eq!(lru, trace(InsertionPolicy::la_sym(2.0, 2.0), &seq, |_| 0.3, 5));
        assert!(lru.iter().any(|h| *h) && lru.iter().any(|h| !*h));
    }
}
