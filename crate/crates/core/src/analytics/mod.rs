//! Closed-form miss-probability models used as oracles for the simulator.
//!
//! Probability-valued formulas clamp their result into `[0, 1]`. Every clamp
//! that actually moves a value is counted; see [`clamp_events`].

mod che;
mod gamma;
mod grid;
mod path;
mod sym;

use std::sync::atomic::{AtomicU64, Ordering};

pub use che::{
    expected_occupancy, miss_asym, miss_mixture, mtf_prob, phi, solve_tau, CheSolution, DecisionDistribution,
};
pub use gamma::gamma;
pub use grid::{miss_grid, sym_curve, write_model_csv, ModelRow};
pub use path::PathModel;
pub use sym::{eta_asym, eta_sym, gamma_term, miss_sym, tau_sym};

static CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of probability values clamped into `[0, 1]` since process start.
pub fn clamp_events() -> u64 {
    CLAMPS.load(Ordering::Relaxed)
}

pub(crate) fn clamp_prob(v: f64) -> f64 {
    if (0.0..=1.0).contains(&v) {
        v
    } else {
        CLAMPS.fetch_add(1, Ordering::Relaxed);
        if v.is_nan() {
            1.0
        } else {
            v.clamp(0.0, 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_counts_only_real_clamps() {
        let before = clamp_events();
        assert_eq!(clamp_prob(0.5), 0.5);
        assert_eq!(clamp_prob(1.0), 1.0);
        assert_eq!(clamp_events(), before);
        assert_eq!(clamp_prob(1.5), 1.0);
        assert_eq!(clamp_prob(-0.1), 0.0);
        assert!(clamp_events() >= before + 2);
    }
}
