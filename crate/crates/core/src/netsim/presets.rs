//! The three evaluation scenarios: single cache, line of three caches and a
//! binary tree of seven caches.
//!
//! Propagation delays are zero; latency differences come from queueing and
//! hop count alone.

use super::config::{PolicyDefaults, ScenarioConfig};
use super::topology::{LinkSpec, NodeKind, NodeSpec, Topology};
use crate::cache::InsertionPolicy;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 3] = ["single", "line", "tree"];

/// Default number of requests per user population.
pub const DEFAULT_REQUESTS_PER_USER: u64 = 200_000;

const KB: u64 = 1_000;
const KBPS: f64 = 1e3;
const MBPS: f64 = 1e6;

fn user(name: &str) -> NodeSpec {
    NodeSpec {
        name: name.into(),
        kind: NodeKind::User { rate: 1.0 },
    }
}

fn cache(name: &str, capacity: usize) -> NodeSpec {
    NodeSpec {
        name: name.into(),
        kind: NodeKind::Cache { capacity, policy: None },
    }
}

fn repository() -> NodeSpec {
    NodeSpec {
        name: "repository".into(),
        kind: NodeKind::Repository,
    }
}

fn link(from: usize, to: usize, capacity_bps: f64) -> LinkSpec {
    LinkSpec {
        from,
        to,
        capacity_bps,
        prop_delay_s: 0.0,
    }
}

fn base(name: &str, topology: Topology, object: u64, defaults: PolicyDefaults) -> ScenarioConfig {
    let users = topology.users().count() as u64;
    ScenarioConfig {
        name: name.into(),
        topology,
        catalog_size: 20_000,
        alpha: 1.7,
        object_size_bytes: object,
        packet_size_bytes: 10 * KB,
        policy: InsertionPolicy::lac(defaults.beta, defaults.gamma),
        defaults,
        horizon: DEFAULT_REQUESTS_PER_USER * users,
        seed: 1,
        warmup_requests: 0,
    }
}

/// User → cache (200 Kbps) → repository (30 Kbps); 8-object cache.
pub fn single() -> ScenarioConfig {
    let topology = Topology {
        nodes: vec![user("user"), cache("cache", 8), repository()],
        links: vec![link(0, 1, 200.0 * KBPS), link(1, 2, 30.0 * KBPS)],
    };
    base(
        "single",
        topology,
        10 * KB,
        PolicyDefaults {
            beta: 5.0,
            gamma: 5.0,
            lcp_p: 0.1,
        },
    )
}

/// User → cache1 → cache2 → cache3 → repository at 300/200/200/30 Kbps.
pub fn line() -> ScenarioConfig {
    let topology = Topology {
        nodes: vec![
            user("user"),
            cache("cache1", 8),
            cache("cache2", 8),
            cache("cache3", 8),
            repository(),
        ],
        links: vec![
            link(0, 1, 300.0 * KBPS),
            link(1, 2, 200.0 * KBPS),
            link(2, 3, 200.0 * KBPS),
            link(3, 4, 30.0 * KBPS),
        ],
    };
    base(
        "line",
        topology,
        10 * KB,
        PolicyDefaults {
            beta: 5.0,
            gamma: 5.0,
            lcp_p: 0.1,
        },
    )
}

/// Binary tree of seven 8 MB caches over three levels, one user population
/// per leaf, 1 MB objects of 100 packets. Links run at 30 Mbps except the
/// 9 Mbps link into the repository.
pub fn tree() -> ScenarioConfig {
    let mut nodes = Vec::new();
    let mut links = Vec::new();
    // 0: repository, 1: root cache, 2-3: middle, 4-7: leaves, 8-11: users
    nodes.push(repository());
    nodes.push(cache("cache-l3", 8));
    for i in 0..2 {
        nodes.push(cache(&format!("cache-l2-{i}"), 8));
    }
    for i in 0..4 {
        nodes.push(cache(&format!("cache-l1-{i}"), 8));
    }
    for i in 0..4 {
        nodes.push(user(&format!("users-{i}")));
    }
    for i in 0..4 {
        links.push(link(8 + i, 4 + i, 30.0 * MBPS));
    }
    for i in 0..4 {
        links.push(link(4 + i, 2 + i / 2, 30.0 * MBPS));
    }
    for i in 0..2 {
        links.push(link(2 + i, 1, 30.0 * MBPS));
    }
    links.push(link(1, 0, 9.0 * MBPS));
    base(
        "tree",
        Topology { nodes, links },
        1_000 * KB,
        PolicyDefaults {
            beta: 3.0,
            gamma: 3.0,
            lcp_p: 0.03,
        },
    )
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    match name {
        "single" => Ok(single()),
        "line" => Ok(line()),
        "tree" => Ok(tree()),
        other => Err(Error::UnknownPreset(other.into())),
    }
}

/// Id of the data link that leaves the repository.
pub fn repository_link(cfg: &ScenarioConfig) -> Option<usize> {
    let repo = cfg.topology.repository()?;
    cfg.topology.links.iter().position(|l| l.to == repo)
}
