//! Closed forms for the symmetric probabilistic LRU and the occupancy bounds
//! comparing it with asymmetric insertion.

use super::{clamp_prob, gamma::gamma};
use crate::error::{domain, Result};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("closed forms need alpha > 1, got {alpha}")))
    }
}

/// `Γ(1 − 1/α)`, the constant shared by every symmetric closed form.
pub fn gamma_term(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(gamma(1.0 - 1.0 / alpha))
}

/// Steady-state miss probability of rank `k` under symmetric p-LRU.
/// Independent of the mean decision probability.
pub fn miss_sym(k: u32, x: usize, alpha: f64) -> Result<f64> {
    if k == 0 || x == 0 {
        return Err(domain("rank and cache size must be at least 1"));
    }
    let g = gamma_term(alpha)?;
    let ratio = x as f64 / k as f64;
    Ok(clamp_prob((-ratio.powf(alpha) / g.powf(alpha)).exp()))
}

/// Characteristic time of symmetric p-LRU.
pub fn tau_sym(x: usize, lambda: f64, c: f64, mean_p: f64, alpha: f64) -> Result<f64> {
    let g = gamma_term(alpha)?;
    if !(mean_p > 0.0) || !(lambda > 0.0) || !(c > 0.0) {
        return Err(domain("lambda, c and mean_p must be positive"));
    }
    Ok((x as f64).powf(alpha) / (lambda * c * mean_p * g.powf(alpha)))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// Number of most popular objects held with miss probability below `eps`
/// under symmetric p-LRU.
pub fn eta_sym(x: usize, alpha: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let g = gamma_term(alpha)?;
    Ok(x as f64 / (g * (-eps.ln()).powf(1.0 / alpha)))
}

/// Same count under asymmetric insertion, given its characteristic time.
pub fn eta_asym(lambda: f64, c: f64, tau_asym: f64, mean_p: f64, eps: f64, alpha: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(mean_p > 0.0 && mean_p <= 1.0) {
        return Err(domain(format!("mean_p must lie in (0, 1], got {mean_p}")));
    }
    if !(lambda > 0.0 && c > 0.0 && tau_asym > 0.0 && alpha > 0.0) {
        return Err(domain("lambda, c, tau and alpha must be positive"));
    }
    let denom = (1.0 + (1.0 / eps - 1.0) / mean_p).ln();
    Ok((lambda * c * tau_asym / denom).powf(1.0 / alpha))
}
