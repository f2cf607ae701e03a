//! Glue shared by the command line and the acceptance harness: model curves
//! matching a scenario, per-rank deviations, and LCP calibration.

use crate::analytics::{miss_asym, miss_sym, solve_tau};
use crate::cache::{Admission, InsertionPolicy, MtfMode};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::netsim::{run, NodeKind, ScenarioConfig};
use crate::workload::zipf_weights;

/// The cache the first user population attaches to. It sees the raw
/// request stream, so it is the one the single-cache model describes.
pub fn edge_cache(cfg: &ScenarioConfig) -> Option<usize> {
    let user = cfg.topology.users().next()?;
    let link = cfg.topology.links.iter().find(|l| l.from == user)?;
    match cfg.topology.nodes[link.to].kind {
        NodeKind::Cache { .. } => Some(link.to),
        _ => None,
    }
}

/// Aggregate request rate of the users attached to `cache`.
pub fn arrival_rate(cfg: &ScenarioConfig, cache: usize) -> f64 {
    cfg.topology
        .links
        .iter()
        .filter(|l| l.to == cache)
        .filter_map(|l| match cfg.topology.nodes[l.from].kind {
            NodeKind::User { rate } => Some(rate),
            _ => None,
        })
        .sum()
}

fn edge_capacity(cfg: &ScenarioConfig, cache: usize) -> Result<usize> {
    match cfg.topology.nodes[cache].kind {
        NodeKind::Cache { capacity, .. } => Ok(capacity),
        _ => Err(Error::Config(format!("node {cache} is not a cache"))),
    }
}

/// Model miss probabilities for ranks `1..=max_rank` at the edge cache under
/// `policy`, or `None` when the policy has no closed form (latency-aware).
pub fn predicted_miss(cfg: &ScenarioConfig, policy: &InsertionPolicy, max_rank: u32) -> Result<Option<Vec<f64>>> {
    let cache = edge_cache(cfg).ok_or_else(|| Error::Config("no cache next to the users".into()))?;
    let x = edge_capacity(cfg, cache)?;
    let lambda = arrival_rate(cfg, cache);
    let model = zipf_weights(cfg.catalog_size, cfg.alpha)?;
    let asym = |p: f64| -> Result<Vec<f64>> {
        let sol = solve_tau(x, lambda, &model, p)?;
        Ok((1..=max_rank).map(|k| miss_asym(lambda * model.q(k), sol.tau_x, p)).collect())
    };
    match (policy.admission, policy.mtf) {
        (Admission::LatencyAware { .. }, _) => Ok(None),
        (Admission::Always, _) => asym(1.0).map(Some),
        (Admission::Fixed { p }, MtfMode::Asymmetric) => asym(p).map(Some),
        (Admission::Fixed { .. }, MtfMode::Symmetric) => (1..=max_rank)
            .map(|k| miss_sym(k, x, cfg.alpha))
            .collect::<Result<Vec<_>>>()
            .map(Some),
    }
}

/// Simulated miss ratios for ranks `1..=max_rank` at `node`; `None` for
/// ranks never requested there.
pub fn simulated_miss(report: &MetricsReport, node: usize, max_rank: u32) -> Vec<Option<f64>> {
    (1..=max_rank).map(|k| report.node_miss_ratio(node, k)).collect()
}

/// Largest absolute difference over ranks present in both curves.
pub fn max_abs_deviation(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
        .fold(0.0, f64::max)
}

/// Runs `cfg` under its latency-aware default and returns that report with
/// the mean decision probability, the value LCP should then be run with.
pub fn calibrate_lcp(cfg: &ScenarioConfig) -> Result<(MetricsReport, f64)> {
    let lac = InsertionPolicy::lac(cfg.defaults.beta, cfg.defaults.gamma);
    let report = run(&cfg.clone().with_policy(lac))?;
    let p = report
        .mean_decision_prob()
        .ok_or_else(|| Error::Config("latency-aware run took no decisions".into()))?;
    Ok((report, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{line, single, tree};

    #[test]
    fn edge_caches_of_presets() {
        assert_eq!(edge_cache(&single()), Some(1));
        assert_eq!(edge_cache(&line()), Some(1));
        let t = tree();
        let e = edge_cache(&t).unwrap();
        assert_eq!(t.topology.nodes[e].name, "cache-l1-0");
        assert_eq!(arrival_rate(&t, e), 1.0);
    }

    #[test]
    fn latency_aware_has_no_curve() {
        let cfg = single();
        assert!(predicted_miss(&cfg, &InsertionPolicy::lac(5.0, 5.0), 5).unwrap().is_none());
        let lru = predicted_miss(&cfg, &InsertionPolicy::lru(), 20).unwrap().unwrap();
        assert_eq!(lru.len(), 20);
        assert!(lru.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn deviation_skips_missing() {
        let a = [Some(0.1), None, Some(0.5)];
        let b = [Some(0.2), Some(0.9), Some(0.45)];
        assert!((max_abs_deviation(&a, &b) - 0.1).abs() < 1e-12);
        assert_eq!(max_abs_deviation(&[None], &[Some(1.0)]), 0.0);
    }
}
