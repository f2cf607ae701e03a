//! Scenario configuration and its TOML file form.
//!
//! ```toml
//! name = "custom"
//! catalog_size = 20000
//! alpha = 1.7
//! object_size_bytes = 10000
//! packet_size_bytes = 10000
//! horizon = 200000          # total user requests
//! seed = 1
//! warmup_requests = 0       # cache statistics start after this many requests
//!
//! [defaults]                # resolves bare `lac` / `lcp` / `sym-la` names
//! beta = 5.0
//! gamma = 5.0
//! lcp_p = 0.1
//!
//! [policy]                  # scenario-wide cache policy
//! kind = "latency_aware"    # always | fixed | latency_aware
//! beta = 5.0
//! gamma = 5.0
//! mtf = "asymmetric"        # asymmetric | symmetric
//!
//! [[nodes]]
//! name = "users"
//! kind = "user"
//! rate = 1.0
//!
//! [[nodes]]
//! name = "edge"
//! kind = "cache"
//! capacity = 8              # objects
//! # policy = { kind = "fixed", p = 0.1 }   optional per-node override
//!
//! [[nodes]]
//! name = "origin"
//! kind = "repository"
//!
//! [[links]]                 # `from` is the consumer side, `to` leads to the repository
//! from = "users"
//! to = "edge"
//! capacity_bps = 200000
//! prop_delay_s = 0.0
//! ```

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::topology::{LinkSpec, NodeKind, NodeSpec, Topology};
use crate::cache::InsertionPolicy;
use crate::error::{Error, Result};

/// Parameters used when a policy name omits its own.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct PolicyDefaults {
    pub beta: f64,
    pub gamma: f64,
    pub lcp_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub topology: Topology,
    pub catalog_size: usize,
    pub alpha: f64,
    pub object_size_bytes: u64,
    pub packet_size_bytes: u64,
    /// Policy of every cache without its own override.
    pub policy: InsertionPolicy,
    pub defaults: PolicyDefaults,
    /// Total number of user requests across all users.
    pub horizon: u64,
    pub seed: u64,
    /// Cache hit/miss counters start once this many requests were issued.
    pub warmup_requests: u64,
}

impl ScenarioConfig {
    pub fn packets_per_object(&self) -> u32 {
        self.object_size_bytes.div_ceil(self.packet_size_bytes.max(1)) as u32
    }

    pub fn validate(&self) -> Result<()> {
        if self.catalog_size == 0 || self.catalog_size > u32::MAX as usize {
            return Err(Error::Config("catalog size must be positive".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Config("zipf exponent must be positive".into()));
        }
        if self.object_size_bytes == 0 || self.packet_size_bytes == 0 {
            return Err(Error::Config("object and packet sizes must be positive".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least one request".into()));
        }
        self.policy.validate()?;
        self.topology.routes()?;
        Ok(())
    }

    /// Sets the policy of every cache, dropping per-node overrides.
    pub fn with_policy(mut self, policy: InsertionPolicy) -> Self {
        self.policy = policy;
        for n in &mut self.topology.nodes {
            if let NodeKind::Cache { policy, .. } = &mut n.kind {
                *policy = None;
            }
        }
        self
    }

    pub fn user_count(&self) -> usize {
        self.topology.users().count()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        raw.into_config()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_name")]
    name: String,
    catalog_size: usize,
    alpha: f64,
    object_size_bytes: u64,
    packet_size_bytes: u64,
    horizon: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    warmup_requests: u64,
    defaults: Option<PolicyDefaults>,
    policy: InsertionPolicy,
    nodes: Vec<RawNode>,
    links: Vec<RawLink>,
}

fn default_name() -> String {
    "custom".into()
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawNode {
    User {
        name: String,
        rate: f64,
    },
    Cache {
        name: String,
        capacity: usize,
        policy: Option<InsertionPolicy>,
    },
    Repository {
        name: String,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: String,
    to: String,
    capacity_bps: f64,
    #[serde(default)]
    prop_delay_s: f64,
}

impl RawConfig {
    fn into_config(self) -> Result<ScenarioConfig> {
        let nodes: Vec<NodeSpec> = self
            .nodes
            .into_iter()
            .map(|n| match n {
                RawNode::User { name, rate } => NodeSpec {
                    name,
                    kind: NodeKind::User { rate },
                },
                RawNode::Cache { name, capacity, policy } => NodeSpec {
                    name,
                    kind: NodeKind::Cache { capacity, policy },
                },
                RawNode::Repository { name } => NodeSpec {
                    name,
                    kind: NodeKind::Repository,
                },
            })
            .collect();
        let mut ids = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if ids.insert(n.name.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate node name `{}`", n.name)));
            }
        }
        let lookup = |name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| Error::Config(format!("link refers to unknown node `{name}`")))
        };
        let links = self
            .links
            .iter()
            .map(|l| {
                Ok(LinkSpec {
                    from: lookup(&l.from)?,
                    to: lookup(&l.to)?,
                    capacity_bps: l.capacity_bps,
                    prop_delay_s: l.prop_delay_s,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = ScenarioConfig {
            name: self.name,
            topology: Topology { nodes, links },
            catalog_size: self.catalog_size,
            alpha: self.alpha,
            object_size_bytes: self.object_size_bytes,
            packet_size_bytes: self.packet_size_bytes,
            policy: self.policy,
            defaults: self.defaults.unwrap_or(PolicyDefaults {
                beta: 5.0,
                gamma: 5.0,
                lcp_p: 0.1,
            }),
            horizon: self.horizon,
            seed: self.seed,
            warmup_requests: self.warmup_requests,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Policy names accepted on the command line. Parameters left out are taken
/// from the scenario's [`PolicyDefaults`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyChoice {
    Lru,
    Lcp(Option<f64>),
    Sym(f64),
    SymLa(Option<(f64, f64)>),
    Lac(Option<(f64, f64)>),
}

impl PolicyChoice {
    pub fn resolve(&self, d: &PolicyDefaults) -> InsertionPolicy {
        match *self {
            PolicyChoice::Lru => InsertionPolicy::lru(),
            PolicyChoice::Lcp(p) => InsertionPolicy::lcp(p.unwrap_or(d.lcp_p)),
            PolicyChoice::Sym(p) => InsertionPolicy::sym(p),
            PolicyChoice::SymLa(bg) => {
                let (b, g) = bg.unwrap_or((d.beta, d.gamma));
                InsertionPolicy::la_sym(b, g)
            }
            PolicyChoice::Lac(bg) => {
                let (b, g) = bg.unwrap_or((d.beta, d.gamma));
                InsertionPolicy::lac(b, g)
            }
        }
    }

    pub fn is_latency_aware(&self) -> bool {
        matches!(self, PolicyChoice::Lac(_) | PolicyChoice::SymLa(_))
    }
}

fn parse_prob(s: &str) -> Result<f64> {
    let p: f64 = s
        .parse()
        .map_err(|_| Error::Config(format!("`{s}` is not a probability")))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::Config(format!("probability {p} outside [0, 1]")))
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config(format!("expected `<beta>,<gamma>`, got `{s}`"));
    let (b, g) = s.split_once(',').ok_or_else(bad)?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let g: f64 = g.trim().parse().map_err(|_| bad())?;
    if b < 0.0 || g < 0.0 || !b.is_finite() || !g.is_finite() {
        return Err(Error::Config("beta and gamma must be non-negative".into()));
    }
    Ok((b, g))
}

impl FromStr for PolicyChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("lru", None) => Ok(PolicyChoice::Lru),
            ("lcp", None) => Ok(PolicyChoice::Lcp(None)),
            ("lcp", Some(a)) => Ok(PolicyChoice::Lcp(Some(parse_prob(a)?))),
            ("sym", Some(a)) => Ok(PolicyChoice::Sym(parse_prob(a)?)),
            ("sym-la", None) => Ok(PolicyChoice::SymLa(None)),
            ("sym-la", Some(a)) => Ok(PolicyChoice::SymLa(Some(parse_pair(a)?))),
            ("lac", None) => Ok(PolicyChoice::Lac(None)),
            ("lac", Some(a)) => Ok(PolicyChoice::Lac(Some(parse_pair(a)?))),
            _ => Err(Error::Config(format!(
                "unknown policy `{s}` (expected lru, lcp[:p], sym:p, sym-la[:b,g] or lac[:b,g])"
            ))),
        }
    }
}
