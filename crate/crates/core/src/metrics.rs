//! Simulation statistics and their CSV serialization.
//!
//! Four files are written per run, each starting with one `#` comment line
//! that names the schema version, seed and policy:
//!
//! | file           | columns                                                        |
//! |----------------|----------------------------------------------------------------|
//! | `miss_prob.csv`| `node_id,rank,requests,misses,miss_ratio`                      |
//! | `delivery.csv` | `completion_seq,rank,duration,cum_mean,cum_stddev`             |
//! | `links.csv`    | `link_id,bytes,rho`                                            |
//! | `summary.csv`  | `policy,mean_delivery,stddev_delivery,overall_miss,mean_decision_prob` |
//!
//! Running statistics are cumulative from the first completion and use the
//! population standard deviation (divisor n). A sliding-window variant can be
//! written on request to `delivery_window.csv`
//! (`completion_seq,window_mean,window_stddev`).

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RankCounter {
    pub requests: u64,
    pub hits: u64,
}

/// Sparse per-(node, rank) request and hit counters.
#[derive(Debug, Clone, Default)]
pub struct RankStats {
    per_node: BTreeMap<usize, BTreeMap<u32, RankCounter>>,
}

impl RankStats {
    pub fn record(&mut self, node: usize, rank: u32, hit: bool) {
        let c = self.per_node.entry(node).or_default().entry(rank).or_default();
        c.requests += 1;
        c.hits += u64::from(hit);
    }

    pub fn get(&self, node: usize, rank: u32) -> Option<RankCounter> {
        self.per_node.get(&node)?.get(&rank).copied()
    }

    pub fn node(&self, node: usize) -> impl Iterator<Item = (u32, RankCounter)> + '_ {
        self.per_node.get(&node).into_iter().flat_map(|m| m.iter().map(|(r, c)| (*r, *c)))
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_node.keys().copied()
    }

    pub fn totals(&self, node: usize) -> RankCounter {
        self.node(node).fold(RankCounter::default(), |acc, (_, c)| RankCounter {
            requests: acc.requests + c.requests,
            hits: acc.hits + c.hits,
        })
    }
}

/// Empirical miss probability of `rank` at `node`; absent when never requested.
pub fn miss_ratio(stats: &RankStats, node: usize, rank: u32) -> Option<f64> {
    let c = stats.get(node, rank)?;
    (c.requests > 0).then(|| (c.requests - c.hits) as f64 / c.requests as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryRecord {
    pub completion_seq: u64,
    pub rank: u32,
    pub issued_at: f64,
    pub completed_at: f64,
}

impl DeliveryRecord {
    pub fn duration(&self) -> f64 {
        self.completed_at - self.issued_at
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningPoint {
    pub completion_seq: u64,
    pub mean: f64,
    pub stddev: f64,
}

/// Cumulative mean and population standard deviation after each completion
/// (Welford's recurrence).
pub fn running_stats(series: &[DeliveryRecord]) -> Vec<RunningPoint> {
    let mut out = Vec::with_capacity(series.len());
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, rec) in series.iter().enumerate() {
        let n = (i + 1) as f64;
        let x = rec.duration();
        let delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
        out.push(RunningPoint {
            completion_seq: rec.completion_seq,
            mean,
            stddev: (m2 / n).max(0.0).sqrt(),
        });
    }
    out
}

/// Mean and population stddev over the last `window` completions (fewer at
/// the start of the series). A zero window is treated as one.
pub fn windowed_stats(series: &[DeliveryRecord], window: usize) -> Vec<RunningPoint> {
    let window = window.max(1);
    // sums are taken around the first value to limit cancellation
    let shift = series.first().map_or(0.0, DeliveryRecord::duration);
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut out = Vec::with_capacity(series.len());
    for (i, rec) in series.iter().enumerate() {
        let x = rec.duration() - shift;
        sum += x;
        sq += x * x;
        if i >= window {
            let old = series[i - window].duration() - shift;
            sum -= old;
            sq -= old * old;
        }
        let n = (i + 1).min(window) as f64;
        let mean = sum / n;
        out.push(RunningPoint {
            completion_seq: rec.completion_seq,
            mean: mean + shift,
            stddev: (sq / n - mean * mean).max(0.0).sqrt(),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinkStats {
    pub bytes: u64,
    pub busy_seconds: f64,
}

/// Fraction of `elapsed` the link spent transmitting data.
pub fn link_load(link: &LinkStats, elapsed: f64) -> f64 {
    if elapsed <= 0.0 {
        return 0.0;
    }
    (link.busy_seconds / elapsed).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DecisionStats {
    pub count: u64,
    pub prob_sum: f64,
}

impl DecisionStats {
    pub fn record(&mut self, prob: f64) {
        self.count += 1;
        self.prob_sum += prob;
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.prob_sum / self.count as f64)
    }
}

/// Interest accounting at one cache node. Every received interest message is
/// either a hit, forwarded upstream (possibly for a subset of its packets) or
/// fully absorbed by a pending entry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeCounters {
    pub interests: u64,
    pub hits: u64,
    pub forwarded: u64,
    pub aggregated: u64,
}

/// Everything a simulation run measured.
#[derive(Debug, Clone, Default)]
pub struct MetricsReport {
    pub policy: String,
    pub seed: u64,
    /// Cache lookups per (node, rank), plus user-side request counts.
    pub rank_stats: RankStats,
    pub deliveries: Vec<DeliveryRecord>,
    pub links: Vec<LinkStats>,
    /// Stochastic decisions per cache node id.
    pub decisions: BTreeMap<usize, DecisionStats>,
    /// Ids of the cache nodes, in topology order.
    pub cache_nodes: Vec<usize>,
    pub user_nodes: Vec<usize>,
    /// Requests issued by users.
    pub issued: u64,
    /// Interests (object requests) that reached the repository.
    pub repository_requests: u64,
    pub node_counters: BTreeMap<usize, NodeCounters>,
    /// Time of the last processed event.
    pub elapsed: f64,
    /// Set when the run stopped on its wall-clock cap before draining.
    pub truncated: bool,
}

impl MetricsReport {
    pub fn running(&self) -> Vec<RunningPoint> {
        running_stats(&self.deliveries)
    }

    pub fn link_load(&self, link: usize) -> f64 {
        link_load(&self.links[link], self.elapsed)
    }

    pub fn mean_delivery(&self) -> f64 {
        self.running().last().map_or(0.0, |p| p.mean)
    }

    pub fn stddev_delivery(&self) -> f64 {
        self.running().last().map_or(0.0, |p| p.stddev)
    }

    /// Fraction of user requests whose interest had to reach the repository.
    pub fn overall_miss(&self) -> f64 {
        if self.issued == 0 {
            0.0
        } else {
            self.repository_requests as f64 / self.issued as f64
        }
    }

    /// Mean probability over every stochastic decision taken by any cache.
    pub fn mean_decision_prob(&self) -> Option<f64> {
        let total = self.decisions.values().fold(DecisionStats::default(), |acc, d| DecisionStats {
            count: acc.count + d.count,
            prob_sum: acc.prob_sum + d.prob_sum,
        });
        total.mean()
    }

    pub fn node_miss_ratio(&self, node: usize, rank: u32) -> Option<f64> {
        miss_ratio(&self.rank_stats, node, rank)
    }

    fn header(&self) -> String {
        format!(
            "# lacsim schema v{SCHEMA_VERSION} seed={} policy={}",
            self.seed, self.policy
        )
    }

    /// Writes the four report files into `dir`, creating it if needed.
    pub fn export_csv(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|source| io_err(dir, source))?;
        let mut written = Vec::new();

        let path = dir.join("miss_prob.csv");
        let mut w = open(&path, &self.header())?;
        w.write_record(["node_id", "rank", "requests", "misses", "miss_ratio"])?;
        for &node in &self.cache_nodes {
            for (rank, c) in self.rank_stats.node(node) {
                let misses = c.requests - c.hits;
                w.write_record([
                    node.to_string(),
                    rank.to_string(),
                    c.requests.to_string(),
                    misses.to_string(),
                    format!("{:.6}", misses as f64 / c.requests as f64),
                ])?;
            }
        }
        finish(w, &path)?;
        written.push(path);

        let path = dir.join("delivery.csv");
        let mut w = open(&path, &format!("{} stddev=population", self.header()))?;
        w.write_record(["completion_seq", "rank", "duration", "cum_mean", "cum_stddev"])?;
        for (rec, run) in self.deliveries.iter().zip(self.running()) {
            w.write_record([
                rec.completion_seq.to_string(),
                rec.rank.to_string(),
                format!("{:.6}", rec.duration()),
                format!("{:.6}", run.mean),
                format!("{:.6}", run.stddev),
            ])?;
        }
        finish(w, &path)?;
        written.push(path);

        let path = dir.join("links.csv");
        let mut w = open(&path, &self.header())?;
        w.write_record(["link_id", "bytes", "rho"])?;
        for (id, l) in self.links.iter().enumerate() {
            w.write_record([id.to_string(), l.bytes.to_string(), format!("{:.6}", self.link_load(id))])?;
        }
        finish(w, &path)?;
        written.push(path);

        let path = dir.join("summary.csv");
        let mut w = open(&path, &self.header())?;
        w.write_record(["policy", "mean_delivery", "stddev_delivery", "overall_miss", "mean_decision_prob"])?;
        w.write_record([
            self.policy.clone(),
            format!("{:.6}", self.mean_delivery()),
            format!("{:.6}", self.stddev_delivery()),
            format!("{:.6}", self.overall_miss()),
            self.mean_decision_prob().map_or(String::new(), |p| format!("{p:.6}")),
        ])?;
        finish(w, &path)?;
        written.push(path);

        Ok(written)
    }
}

impl MetricsReport {
    /// Writes `delivery_window.csv` with sliding-window statistics.
    pub fn export_window_csv(&self, dir: &Path, window: usize) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|source| io_err(dir, source))?;
        let path = dir.join("delivery_window.csv");
        let comment = format!("{} stddev=population window={}", self.header(), window.max(1));
        let mut w = open(&path, &comment)?;
        w.write_record(["completion_seq", "window_mean", "window_stddev"])?;
        for p in windowed_stats(&self.deliveries, window) {
            w.write_record([p.completion_seq.to_string(), format!("{:.6}", p.mean), format!("{:.6}", p.stddev)])?;
        }
        finish(w, &path)?;
        Ok(path)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn open(path: &Path, comment: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut buf = BufWriter::new(file);
    writeln!(buf, "{comment}").map_err(|e| io_err(path, e))?;
    Ok(csv::Writer::from_writer(buf))
}

fn finish(w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| io_err(path, e.into_error()))?;
    inner.flush().map_err(|e| io_err(path, e))
}
