//! Event loop.
//!
//! Users emit one interest message per object carrying the indices of all
//! its packets (interests are zero-size, so this is equivalent to emitting
//! them back to back). Caches look the object up once per message, keep a
//! pending-interest entry per object with a waiter list per packet, and
//! forward upstream only the packets nobody has asked for yet. Data travel
//! packet by packet through the FIFO links. When the last outstanding packet
//! of an object reaches a cache, the mean of its per-packet latencies drives
//! the admission decision.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::link::Link;
use super::topology::NodeKind;
use crate::cache::{decide_insertion, Admission, InsertionPolicy, LatencyEstimator, Lookup, LruCache, ObjectLatency};
use crate::error::{Error, Result};
use crate::metrics::{DeliveryRecord, MetricsReport};
use crate::workload::{stream_rng, zipf_weights, PopularityModel, RequestSource};

/// Stream ids of cache decision generators live above any node id.
const CACHE_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunLimits {
    pub wall_clock: Option<Duration>,
}

#[derive(Debug)]
enum EventKind {
    Request { user: usize },
    Interest { node: usize, face: usize, rank: u32, packets: Vec<u32> },
    Data { node: usize, rank: u32, index: u32 },
}

#[derive(Debug)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // reversed: BinaryHeap pops the earliest (time, seq) first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct PendingRequest {
    issued_at: f64,
    received: Vec<bool>,
    count: u32,
}

struct UserState {
    source: RequestSource,
    uplink: usize,
    pending: HashMap<u32, Vec<PendingRequest>>,
}

struct PitEntry {
    /// Downstream faces waiting for each packet index.
    waiters: Vec<Vec<usize>>,
    outstanding: u32,
    latency: ObjectLatency,
}

struct CacheState {
    cache: LruCache,
    policy: InsertionPolicy,
    est: LatencyEstimator,
    rng: ChaCha8Rng,
    uplink: usize,
    pit: HashMap<u32, PitEntry>,
}

enum NodeState {
    User(UserState),
    Cache(CacheState),
    Repository,
}

struct Simulation {
    model: PopularityModel,
    nodes: Vec<NodeState>,
    links: Vec<Link>,
    queue: BinaryHeap<Event>,
    seq: u64,
    now: f64,
    horizon: u64,
    warmup: u64,
    packets: u32,
    packet_size: u64,
    completed: u64,
    report: MetricsReport,
}

/// Runs a scenario until every issued request has been delivered.
pub fn run(cfg: &ScenarioConfig) -> Result<MetricsReport> {
    run_with_limits(cfg, RunLimits::default())
}

pub fn run_with_limits(cfg: &ScenarioConfig, limits: RunLimits) -> Result<MetricsReport> {
    cfg.validate()?;
    let mut sim = Simulation::new(cfg)?;
    sim.run(limits)?;
    Ok(sim.report)
}

impl Simulation {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let uplinks = cfg.topology.routes()?;
        let model = zipf_weights(cfg.catalog_size, cfg.alpha)?;
        let links: Vec<Link> = cfg.topology.links.iter().copied().map(Link::new).collect();
        let mut report = MetricsReport {
            policy: cfg.policy.to_string(),
            seed: cfg.seed,
            links: vec![Default::default(); links.len()],
            ..Default::default()
        };
        let mut nodes = Vec::with_capacity(cfg.topology.nodes.len());
        for (id, spec) in cfg.topology.nodes.iter().enumerate() {
            let state = match &spec.kind {
                NodeKind::User { rate } => {
                    report.user_nodes.push(id);
                    NodeState::User(UserState {
                        source: RequestSource::new(*rate, cfg.seed, id as u64)?,
                        uplink: uplinks[id].expect("validated route"),
                        pending: HashMap::new(),
                    })
                }
                NodeKind::Cache { capacity, policy } => {
                    report.cache_nodes.push(id);
                    report.node_counters.insert(id, Default::default());
                    NodeState::Cache(CacheState {
                        cache: LruCache::new(*capacity),
                        policy: policy.unwrap_or(cfg.policy),
                        est: LatencyEstimator::default(),
                        rng: stream_rng(cfg.seed, CACHE_STREAM_BASE + id as u64),
                        uplink: uplinks[id].expect("validated route"),
                        pit: HashMap::new(),
                    })
                }
                NodeKind::Repository => NodeState::Repository,
            };
            nodes.push(state);
        }
        Ok(Self {
            model,
            nodes,
            links,
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            horizon: cfg.horizon,
            warmup: cfg.warmup_requests,
            packets: cfg.packets_per_object(),
            packet_size: cfg.packet_size_bytes,
            completed: 0,
            report,
        })
    }

    fn push(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Event {
            time,
            seq: self.seq,
            kind,
        });
    }

    fn run(&mut self, limits: RunLimits) -> Result<()> {
        let users = self.report.user_nodes.clone();
        for user in users {
            let NodeState::User(u) = &mut self.nodes[user] else { unreachable!() };
            let dt = u.source.next_interarrival();
            self.push(dt, EventKind::Request { user });
        }
        let started = Instant::now();
        let mut processed: u64 = 0;
        while let Some(ev) = self.queue.pop() {
            debug_assert!(ev.time >= self.now, "clock went backwards");
            self.now = ev.time;
            match ev.kind {
                EventKind::Request { user } => self.on_request(user),
                EventKind::Interest {
                    node,
                    face,
                    rank,
                    packets,
                } => self.on_interest(node, face, rank, packets)?,
                EventKind::Data { node, rank, index } => self.on_data(node, rank, index)?,
            }
            processed += 1;
            if processed.is_multiple_of(4096) {
                if let Some(cap) = limits.wall_clock {
                    if started.elapsed() > cap {
                        self.report.truncated = true;
                        break;
                    }
                }
            }
        }
        self.report.elapsed = self.now;
        for (stats, link) in self.report.links.iter_mut().zip(&self.links) {
            *stats = link.stats;
        }
        Ok(())
    }

    fn recording(&self) -> bool {
        self.report.issued > self.warmup
    }

    fn send_interest(&mut self, link: usize, rank: u32, packets: Vec<u32>) {
        let time = self.links[link].transmit(self.now, 0);
        let node = self.links[link].spec.to;
        self.push(
            time,
            EventKind::Interest {
                node,
                face: link,
                rank,
                packets,
            },
        );
    }

    fn send_data(&mut self, link: usize, rank: u32, index: u32) {
        let time = self.links[link].transmit(self.now, self.packet_size);
        let node = self.links[link].spec.from;
        self.push(time, EventKind::Data { node, rank, index });
    }

    fn on_request(&mut self, user: usize) {
        if self.report.issued >= self.horizon {
            return;
        }
        self.report.issued += 1;
        let packets = self.packets;
        let now = self.now;
        let NodeState::User(u) = &mut self.nodes[user] else { unreachable!() };
        let (gap, rank) = u.source.next_request(&self.model);
        u.pending.entry(rank).or_default().push(PendingRequest {
            issued_at: now,
            received: vec![false; packets as usize],
            count: 0,
        });
        let uplink = u.uplink;
        let next = now + gap;
        self.report.rank_stats.record(user, rank, false);
        if self.report.issued < self.horizon {
            self.push(next, EventKind::Request { user });
        }
        self.send_interest(uplink, rank, (0..packets).collect());
    }

    fn on_interest(&mut self, node: usize, face: usize, rank: u32, packets: Vec<u32>) -> Result<()> {
        let recording = self.recording();
        let now = self.now;
        let total_packets = self.packets as usize;
        match &mut self.nodes[node] {
            NodeState::Repository => {
                self.report.repository_requests += 1;
                for idx in packets {
                    self.send_data(face, rank, idx);
                }
            }
            NodeState::Cache(c) => {
                let lookup = c.cache.lookup(rank, &c.policy, &c.est, &mut c.rng)?;
                if let Lookup::Hit { decision: Some(d) } = lookup {
                    self.report.decisions.entry(node).or_default().record(d.prob);
                }
                let counters = self.report.node_counters.entry(node).or_default();
                counters.interests += 1;
                if recording {
                    self.report.rank_stats.record(node, rank, lookup.is_hit());
                }
                if lookup.is_hit() {
                    counters.hits += 1;
                    for idx in packets {
                        self.send_data(face, rank, idx);
                    }
                    return Ok(());
                }
                let entry = c.pit.entry(rank).or_insert_with(|| PitEntry {
                    waiters: vec![Vec::new(); total_packets],
                    outstanding: 0,
                    latency: ObjectLatency::default(),
                });
                let mut forward = Vec::new();
                for idx in packets {
                    let waiting = entry.waiters.get_mut(idx as usize).ok_or_else(|| Error::Protocol {
                        node,
                        msg: format!("packet index {idx} out of range"),
                    })?;
                    if waiting.is_empty() {
                        forward.push(idx);
                    }
                    waiting.push(face);
                }
                if forward.is_empty() {
                    counters.aggregated += 1;
                    return Ok(());
                }
                counters.forwarded += 1;
                entry.outstanding += forward.len() as u32;
                for _ in &forward {
                    c.est.record_forward(rank, now);
                }
                let uplink = c.uplink;
                self.send_interest(uplink, rank, forward);
            }
            NodeState::User(_) => {
                return Err(Error::Protocol {
                    node,
                    msg: "user received an interest".into(),
                })
            }
        }
        Ok(())
    }

    fn on_data(&mut self, node: usize, rank: u32, index: u32) -> Result<()> {
        let now = self.now;
        match &mut self.nodes[node] {
            NodeState::User(u) => {
                let list = u.pending.get_mut(&rank).ok_or_else(|| Error::Protocol {
                    node,
                    msg: format!("unsolicited data for object {rank}"),
                })?;
                let pos = list
                    .iter()
                    .position(|r| !r.received[index as usize])
                    .ok_or_else(|| Error::Protocol {
                        node,
                        msg: format!("duplicate packet {index} of object {rank}"),
                    })?;
                let req = &mut list[pos];
                req.received[index as usize] = true;
                req.count += 1;
                if req.count == self.packets {
                    let done = list.remove(pos);
                    if list.is_empty() {
                        u.pending.remove(&rank);
                    }
                    self.completed += 1;
                    self.report.deliveries.push(DeliveryRecord {
                        completion_seq: self.completed,
                        rank,
                        issued_at: done.issued_at,
                        completed_at: now,
                    });
                }
            }
            NodeState::Cache(c) => {
                let delta_t = c.est.measure_delta_t(rank, now)?;
                let entry = c.pit.get_mut(&rank).ok_or_else(|| Error::Protocol {
                    node,
                    msg: format!("data for object {rank} without a pending entry"),
                })?;
                let faces = std::mem::take(&mut entry.waiters[index as usize]);
                if faces.is_empty() {
                    return Err(Error::Protocol {
                        node,
                        msg: format!("packet {index} of object {rank} was not requested"),
                    });
                }
                entry.latency.push(delta_t);
                entry.outstanding -= 1;
                if entry.outstanding == 0 {
                    let done = c.pit.remove(&rank).expect("entry present");
                    let object_dt = done.latency.mean().expect("at least one packet");
                    if !c.cache.contains(rank) {
                        let d = decide_insertion(&c.policy.admission, object_dt, &c.est, &mut c.rng)?;
                        if c.policy.admission != Admission::Always {
                            self.report.decisions.entry(node).or_default().record(d.prob);
                        }
                        if d.admit {
                            c.cache.insert(rank, object_dt)?;
                            c.est.update(object_dt);
                        }
                    }
                }
                for face in faces {
                    self.send_data(face, rank, index);
                }
            }
            NodeState::Repository => {
                return Err(Error::Protocol {
                    node,
                    msg: "repository received data".into(),
                })
            }
        }
        Ok(())
    }
}
