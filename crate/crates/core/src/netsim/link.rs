use super::topology::LinkSpec;
use crate::metrics::LinkStats;

/// Runtime state of one link: a FIFO store-and-forward queue in the data
/// direction, pure propagation in the interest direction.
#[derive(Debug, Clone)]
pub struct Link {
    pub spec: LinkSpec,
    busy_until: f64,
    pub stats: LinkStats,
}

impl Link {
    pub fn new(spec: LinkSpec) -> Self {
        Self {
            spec,
            busy_until: 0.0,
            stats: LinkStats::default(),
        }
    }

    /// Enqueues a packet of `size_bytes` at `now` and returns its delivery
    /// time at the far end. Zero-size packets only see propagation delay.
    pub fn transmit(&mut self, now: f64, size_bytes: u64) -> f64 {
        if size_bytes == 0 {
            return now + self.spec.prop_delay_s;
        }
        let start = now.max(self.busy_until);
        let service = size_bytes as f64 * 8.0 / self.spec.capacity_bps;
        self.busy_until = start + service;
        self.stats.busy_seconds += service;
        self.stats.bytes += size_bytes;
        self.busy_until + self.spec.prop_delay_s
    }

    pub fn busy_until(&self) -> f64 {
        self.busy_until
    }
}
