use crate::cache::InsertionPolicy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    /// A user population issuing Poisson requests at `rate` objects/s.
    User { rate: f64 },
    /// A caching router. `policy` overrides the scenario-wide policy.
    Cache {
        capacity: usize,
        policy: Option<InsertionPolicy>,
    },
    Repository,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub name: String,
    pub kind: NodeKind,
}

/// A link between `from` (consumer side) and `to` (toward the repository).
/// Interests travel `from → to` with propagation delay only; data travel
/// `to → from` through a FIFO queue of `capacity_bps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub from: usize,
    pub to: usize,
    pub capacity_bps: f64,
    pub prop_delay_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
}

impl Topology {
    /// Checks the tree shape and returns, per node, the id of its upstream
    /// link (`None` for the repository).
    pub fn routes(&self) -> Result<Vec<Option<usize>>> {
        let n = self.nodes.len();
        let repos: Vec<usize> = (0..n)
            .filter(|&i| self.nodes[i].kind == NodeKind::Repository)
            .collect();
        if repos.len() != 1 {
            return Err(Error::Config(format!(
                "expected exactly one repository, found {}",
                repos.len()
            )));
        }
        let mut uplink = vec![None; n];
        for (id, l) in self.links.iter().enumerate() {
            if l.from >= n || l.to >= n || l.from == l.to {
                return Err(Error::Config(format!("link {id} has invalid endpoints")));
            }
            if !(l.capacity_bps > 0.0) || !l.capacity_bps.is_finite() {
                return Err(Error::Config(format!("link {id} has non-positive capacity")));
            }
            if !(l.prop_delay_s >= 0.0) || !l.prop_delay_s.is_finite() {
                return Err(Error::Config(format!("link {id} has a negative propagation delay")));
            }
            if uplink[l.from].replace(id).is_some() {
                return Err(Error::Config(format!(
                    "node `{}` has more than one upstream link",
                    self.nodes[l.from].name
                )));
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match (&node.kind, uplink[i]) {
                (NodeKind::Repository, Some(_)) => {
                    return Err(Error::Config("the repository cannot have an upstream link".into()))
                }
                (NodeKind::Repository, None) => {}
                (_, None) => {
                    return Err(Error::Config(format!("node `{}` has no route to the repository", node.name)))
                }
                (NodeKind::User { rate }, Some(l)) => {
                    if !(*rate > 0.0) || !rate.is_finite() {
                        return Err(Error::Config(format!("user `{}` needs a positive rate", node.name)));
                    }
                    if !matches!(self.nodes[self.links[l].to].kind, NodeKind::Cache { .. }) {
                        return Err(Error::Config(format!("user `{}` must attach to a cache", node.name)));
                    }
                }
                (NodeKind::Cache { policy, .. }, Some(_)) => {
                    if let Some(p) = policy {
                        p.validate()?;
                    }
                }
            }
        }
        if self.links.iter().any(|l| matches!(self.nodes[l.to].kind, NodeKind::User { .. })) {
            return Err(Error::Config("users cannot forward interests for other nodes".into()));
        }
        // every path must end at the repository within n hops
        for start in 0..n {
            let mut cur = start;
            let mut hops = 0;
            while let Some(l) = uplink[cur] {
                cur = self.links[l].to;
                hops += 1;
                if hops > n {
                    return Err(Error::Config("routes contain a cycle".into()));
                }
            }
            if cur != repos[0] {
                return Err(Error::Config("route does not reach the repository".into()));
            }
        }
        Ok(uplink)
    }

    pub fn users(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i].kind, NodeKind::User { .. }))
    }

    pub fn caches(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i].kind, NodeKind::Cache { .. }))
    }

    pub fn repository(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&i| self.nodes[i].kind == NodeKind::Repository)
    }

    /// Id of the link joining `from` to its upstream neighbour `to`.
    pub fn find_link(&self, from: usize, to: usize) -> Option<usize> {
        self.links.iter().position(|l| l.from == from && l.to == to)
    }
}
