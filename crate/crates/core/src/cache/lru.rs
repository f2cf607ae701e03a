//! Move-to-front list over object ranks.
//!
//! Entries live in a slab of slots linked front (most recent) to back (least
//! recent); a hash index maps rank to slot so lookup, move-to-front, insert
//! and evict are all O(1). Each entry carries the retrieval latency observed
//! when it was admitted, used by symmetric latency-aware hit decisions.

use std::collections::HashMap;

use rand::Rng;

use super::estimator::LatencyEstimator;
use super::policy::{decide_insertion, Decision, InsertionPolicy, MtfMode};
use crate::error::{Error, Result};

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Slot {
    rank: u32,
    latency: f64,
    prev: usize,
    next: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lookup {
    /// Present. `decision` is set when a symmetric policy drew an MTF coin.
    Hit { decision: Option<Decision> },
    Miss,
}

impl Lookup {
    pub fn is_hit(&self) -> bool {
        matches!(self, Lookup::Hit { .. })
    }
}

#[derive(Debug, Clone)]
pub struct LruCache {
    capacity: usize,
    index: HashMap<u32, usize>,
    slots: Vec<Slot>,
    free: Vec<usize>,
    head: usize,
    tail: usize,
}

impl LruCache {
    /// A zero capacity is accepted and yields a cache that never stores.
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            index: HashMap::with_capacity(capacity),
            slots: Vec::with_capacity(capacity),
            free: Vec::new(),
            head: NIL,
            tail: NIL,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, rank: u32) -> bool {
        self.index.contains_key(&rank)
    }

    /// Latency recorded when `rank` was admitted.
    pub fn latency_of(&self, rank: u32) -> Option<f64> {
        self.index.get(&rank).map(|&i| self.slots[i].latency)
    }

    /// Ranks from most to least recently used.
    pub fn entries(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = self.head;
        while cur != NIL {
            out.push(self.slots[cur].rank);
            cur = self.slots[cur].next;
        }
        out
    }

    /// Moves `rank` to the front; false if absent.
    pub fn touch(&mut self, rank: u32) -> bool {
        match self.index.get(&rank) {
            Some(&i) => {
                if self.head != i {
                    self.unlink(i);
                    self.push_front(i);
                }
                true
            }
            None => false,
        }
    }

    /// Looks `rank` up and applies the policy's move-to-front rule on a hit.
    ///
    /// A miss leaves the list untouched; admission of the missing object is a
    /// separate step once it has been retrieved.
    pub fn lookup<R: Rng + ?Sized>(
        &mut self,
        rank: u32,
        policy: &InsertionPolicy,
        est: &LatencyEstimator,
        rng: &mut R,
    ) -> Result<Lookup> {
        let Some(&slot) = self.index.get(&rank) else {
            return Ok(Lookup::Miss);
        };
        match policy.mtf {
            MtfMode::Asymmetric => {
                self.touch(rank);
                Ok(Lookup::Hit { decision: None })
            }
            MtfMode::Symmetric => {
                let latency = self.slots[slot].latency;
                let decision = decide_insertion(&policy.admission, latency, est, rng)?;
                if decision.admit {
                    self.touch(rank);
                }
                Ok(Lookup::Hit {
                    decision: Some(decision),
                })
            }
        }
    }

    /// Stores `rank` at the front, returning the evicted tail if the cache was full.
    pub fn insert(&mut self, rank: u32, latency: f64) -> Result<Option<u32>> {
        if self.contains(rank) {
            return Err(Error::AlreadyCached { rank });
        }
        if self.capacity == 0 {
            return Ok(None);
        }
        let evicted = if self.len() == self.capacity {
            let victim = self.tail;
            self.unlink(victim);
            let old = self.slots[victim].rank;
            self.index.remove(&old);
            self.free.push(victim);
            Some(old)
        } else {
            None
        };
        let slot = Slot {
            rank,
            latency,
            prev: NIL,
            next: NIL,
        };
        let i = match self.free.pop() {
            Some(i) => {
                self.slots[i] = slot;
                i
            }
            None => {
                self.slots.push(slot);
                self.slots.len() - 1
            }
        };
        self.push_front(i);
        self.index.insert(rank, i);
        Ok(evicted)
    }

    fn unlink(&mut self, i: usize) {
        let (prev, next) = (self.slots[i].prev, self.slots[i].next);
        match prev {
            NIL => self.head = next,
            p => self.slots[p].next = next,
        }
        match next {
            NIL => self.tail = prev,
            n => self.slots[n].prev = prev,
        }
        self.slots[i].prev = NIL;
        self.slots[i].next = NIL;
    }

    fn push_front(&mut self, i: usize) {
        self.slots[i].prev = NIL;
        self.slots[i].next = self.head;
        if self.head != NIL {
            self.slots[self.head].prev = i;
        }
        self.head = i;
        if self.tail == NIL {
            self.tail = i;
        }
    }
}
