//! Independent oracles shared by the oracle tests and the acceptance run.
//! Each check returns a description of the first mismatch it finds.

#![allow(dead_code)]

use lac_core::analytics::{
    eta_asym, eta_sym, miss_grid, gamma, miss_asym, miss_mixture, miss_sym, solve_tau, tau_sym, DecisionDistribution,
    PathModel,
};
use lac_core::metrics::{running_stats, DeliveryRecord};
use lac_core::workload::{stream_rng, zipf_weights, PopularityModel, RequestSource};

pub type Check = Result<(), String>;

fn close(label: &str, got: f64, want: f64, rel: f64) -> Check {
    let scale = want.abs().max(f64::MIN_POSITIVE);
    if ((got - want) / scale).abs() <= rel {
        Ok(())
    } else {
        Err(format!("{label}: got {got:e}, want {want:e} (rel tol {rel:e})"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Compensated summation, kept apart from the library's own sums.
fn neumaier<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

// Frozen values computed with mpmath at 40 digits.
const C_20000_1P7: f64 = 0.487_116_963_441_639_587_690_626;
const MISS_SYM_K1: f64 = 9.051_828_109_870_097e-5;
const MISS_SYM_K5: f64 = 0.546_877_833_292_512_1;
const TAU_SYM_P01: f64 = 191.123_681_277_477_294_976_2;
const ETA_SYM_A2: f64 = 2.103_256_348_464_427_589_642;
const TAU_P01: f64 = 112.010_011_008_711_730_14;
const TAU_P1: f64 = 21.249_905_405_636_580_596;
const GAMMAS: [(f64, f64); 5] = [
    (0.25, 3.625_609_908_221_908_311_9),
    (3.3, 2.683_437_381_955_768_793_6),
    (0.1, 9.513_507_698_668_731_836_3),
    (7.5, 1_871.254_305_797_788_346_5),
    (20.5, 540_624_298_233_507_504.47),
];

pub fn zipf_head_by_summation() -> Check {
    let m = zipf_weights(20_000, 1.7).map_err(|e| e.to_string())?;
    let zeta = neumaier((1..=20_000u32).map(|k| (k as f64).powf(-1.7)));
    close("q(1) vs compensated sum", m.q(1), 1.0 / zeta, 1e-13)?;
    close("q(1) vs frozen", m.q(1), C_20000_1P7, 1e-12)?;
    close("norm_c", m.norm_c(), C_20000_1P7, 1e-12)
}

pub fn zipf_mass_sums_to_one() -> Check {
    for n in [1usize, 10, 1_000, 1_000_000] {
        for alpha in [0.6, 1.0, 1.7] {
            let m = zipf_weights(n, alpha).map_err(|e| e.to_string())?;
            let total = neumaier(m.weights().iter().copied());
            ensure((total - 1.0).abs() < 1e-12, || format!("N={n} alpha={alpha}: mass {total}"))?;
        }
    }
    Ok(())
}

/// Chi-square critical value for 99 degrees of freedom at significance 0.01.
const CHI2_99_001: f64 = 134.642;

pub fn zipf_frequencies_chi_square() -> Check {
    let m = zipf_weights(100, 1.7).map_err(|e| e.to_string())?;
    let mut rng = stream_rng(2024, 0);
    let draws = 1_000_000u32;
    let mut counts = vec![0u64; 100];
    for _ in 0..draws {
        counts[m.sample_rank(&mut rng) as usize - 1] += 1;
    }
    let stat: f64 = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let e = m.q(i as u32 + 1) * draws as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    ensure(stat < CHI2_99_001, || format!("chi-square {stat:.2} >= {CHI2_99_001}"))
}

pub fn exponential_sample_mean() -> Check {
    let mut src = RequestSource::new(1.0, 99, 0).map_err(|e| e.to_string())?;
    let mean = neumaier((0..1_000_000).map(|_| src.next_interarrival())) / 1e6;
    ensure((mean - 1.0).abs() <= 0.01, || format!("sample mean {mean}"))
}

/// Locates the sign change of `f` on a uniform grid.
fn grid_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Option<f64> {
    let h = (hi - lo) / steps as f64;
    let mut prev = f(lo);
    for i in 1..=steps {
        let t = lo + h * i as f64;
        let cur = f(t);
        if prev < 0.0 && cur >= 0.0 {
            return Some(t - h / 2.0);
        }
        prev = cur;
    }
    None
}

pub fn tau_equal_weights_grid_scan() -> Check {
    let m = PopularityModel::from_weights(vec![1.0; 3]).map_err(|e| e.to_string())?;
    let sol = solve_tau(2, 1.0, &m, 1.0).map_err(|e| e.to_string())?;
    let exact = 3.0 * 3f64.ln();
    let scan = grid_root(|t| 3.0 * (1.0 - (-t / 3.0).exp()) - 2.0, 0.0, 10.0, 1_000_000)
        .ok_or("grid scan found no root")?;
    ensure((scan - exact).abs() < 1e-5, || format!("scan {scan} vs 3 ln 3"))?;
    ensure((sol.tau_x - exact).abs() < 1e-8, || format!("bisection {} vs 3 ln 3 = {exact}", sol.tau_x))
}

pub fn tau_increases_with_cache_size() -> Check {
    let m = zipf_weights(20_000, 1.7).map_err(|e| e.to_string())?;
    let mut prev = 0.0;
    for x in 1..=40 {
        let t = solve_tau(x, 1.0, &m, 0.5).map_err(|e| e.to_string())?.tau_x;
        ensure(t > prev, || format!("tau({x}) = {t} not above tau({}) = {prev}", x - 1))?;
        prev = t;
    }
    Ok(())
}

pub fn mixture_two_term_value() -> Check {
    let d = DecisionDistribution::new(vec![0.2, 0.8], vec![0.5, 0.5]).map_err(|e| e.to_string())?;
    let want = 0.5 * (0.5 / 0.6) + 0.5 * (0.5 / 0.9);
    close("two-term mixture", miss_mixture(&d, 0.5), want, 1e-15)
}

pub fn mixture_dominates_mean_grid() -> Check {
    let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    for &a in &grid {
        for &b in &grid {
            for &w in &[0.1, 0.5, 0.9] {
                let d = DecisionDistribution::new(vec![a, b], vec![w, 1.0 - w]).map_err(|e| e.to_string())?;
                for &phi in &grid {
                    // λτ chosen so that the single-rate model sees the same φ
                    let lt = -(1.0 - phi).ln();
                    let mix = miss_mixture(&d, phi);
                    let mean = miss_asym(1.0, lt, d.mean());
                    ensure(mix >= mean - 1e-14, || {
                        format!("u={{{a},{b}}} w={w} phi={phi}: mixture {mix} < {mean}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

pub fn frozen_high_precision_values() -> Check {
    for (z, want) in GAMMAS {
        close(&format!("gamma({z})"), gamma(z), want, 1e-12)?;
    }
    let e = |r: lac_core::Result<f64>| r.map_err(|e| e.to_string());
    close("miss_sym k=1", e(miss_sym(1, 8, 1.7))?, MISS_SYM_K1, 1e-10)?;
    close("miss_sym k=5", e(miss_sym(5, 8, 1.7))?, MISS_SYM_K5, 1e-12)?;
    close("tau_sym", e(tau_sym(8, 1.0, C_20000_1P7, 0.1, 1.7))?, TAU_SYM_P01, 1e-11)?;
    close("eta_sym alpha=2", e(eta_sym(8, 2.0, 0.01))?, ETA_SYM_A2, 1e-12)?;
    let by_hand = 8.0 / (std::f64::consts::PI.sqrt() * 100f64.ln().sqrt());
    close("eta_sym closed form", e(eta_sym(8, 2.0, 0.01))?, by_hand, 1e-13)?;

    let m = zipf_weights(20_000, 1.7).map_err(|e| e.to_string())?;
    let checks: [(f64, f64, [(u32, f64); 3]); 2] = [
        (
            0.1,
            TAU_P01,
            [(1, 2.013_885_205_135_6e-23), (5, 0.230_598_800_262_168_85), (8, 0.719_007_507_440_025_26)],
        ),
        (
            1.0,
            TAU_P1,
            [(1, 3.195_476_034_626_776_2e-5), (5, 0.511_182_333_682_512_25), (8, 0.739_476_675_885_654_87)],
        ),
    ];
    for (p, tau, pis) in checks {
        let sol = solve_tau(8, 1.0, &m, p).map_err(|e| e.to_string())?;
        close(&format!("tau p={p}"), sol.tau_x, tau, 1e-10)?;
        for (k, want) in pis {
            close(&format!("pi_{k} p={p}"), miss_asym(m.q(k), sol.tau_x, p), want, 1e-7)?;
        }
    }
    Ok(())
}

/// Rebuilds the model-grid point (k=1, p=0.1) with a separate occupancy sum and
/// a bisection run to 1e-13.
pub fn grid_spot_value() -> Check {
    let (n, alpha, x, p) = (20_000u32, 1.7, 8usize, 0.1);
    let zeta = neumaier((1..=n).map(|k| (k as f64).powf(-alpha)));
    let q = |k: u32| (k as f64).powf(-alpha) / zeta;
    let miss = |k: u32, t: f64| {
        let s = (-q(k) * t).exp();
        s / (s + p * (1.0 - s))
    };
    let occ = |t: f64| neumaier((1..=n).map(|k| 1.0 - miss(k, t))) - x as f64;
    let (mut lo, mut hi) = (1.0, 1e4);
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if occ(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let m = zipf_weights(n as usize, alpha).map_err(|e| e.to_string())?;
    let rows = miss_grid(x, &m, 1.0, &[p], 1).map_err(|e| e.to_string())?;
    close("grid tau", rows[0].tau_x, tau, 1e-10)?;
    close("grid pi_1", rows[0].pi, miss(1, tau), 1e-7)
}

pub fn eta_ratio_limit() -> Check {
    let (alpha, eps) = (1.7, 0.01);
    let m = zipf_weights(20_000, alpha).map_err(|e| e.to_string())?;
    let es = eta_sym(8, alpha, eps).map_err(|e| e.to_string())?;
    let bound = (-eps.ln()).powf(1.0 / alpha);
    let mut prev = 0.0;
    for p in [1e-1, 1e-2, 1e-3, 1e-4] {
        let tau = solve_tau(8, 1.0, &m, p).map_err(|e| e.to_string())?.tau_x;
        let r = eta_asym(1.0, m.norm_c(), tau, p, eps, alpha).map_err(|e| e.to_string())? / es;
        ensure(r > prev, || format!("ratio {r} at p={p} did not grow"))?;
        prev = r;
    }
    ensure(prev >= bound, || format!("ratio {prev} at p=1e-4 below {bound}"))
}

fn records(durations: &[f64]) -> Vec<DeliveryRecord> {
    durations
        .iter()
        .enumerate()
        .map(|(i, &d)| DeliveryRecord {
            completion_seq: i as u64 + 1,
            rank: 1,
            issued_at: 0.0,
            completed_at: d,
        })
        .collect()
}

pub fn running_stats_two_pass() -> Check {
    let r = running_stats(&records(&[1.0, 2.0, 3.0, 4.0]));
    close("mean [1,2,3,4]", r[3].mean, 2.5, 1e-15)?;
    close("stddev [1,2,3,4]", r[3].stddev, 1.25f64.sqrt(), 1e-15)?;

    // offset series stresses cancellation in naive one-pass formulas
    let mut src = RequestSource::new(0.5, 7, 3).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = (0..1_000_000).map(|_| 1_000.0 + src.next_interarrival()).collect();
    let run = running_stats(&records(&xs));
    for n in [10usize, 1_000, 100_000, 1_000_000] {
        let head = &xs[..n];
        let mean = neumaier(head.iter().copied()) / n as f64;
        let var = neumaier(head.iter().map(|x| (x - mean).powi(2))) / n as f64;
        close(&format!("mean n={n}"), run[n - 1].mean, mean, 1e-12)?;
        close(&format!("stddev n={n}"), run[n - 1].stddev, var.sqrt(), 1e-9)?;
    }
    Ok(())
}

pub fn vrtt_hand_expansion() -> Check {
    let p = PathModel::new(vec![1.0, 2.0, 4.0], vec![0.5, 0.5, 0.0]).map_err(|e| e.to_string())?;
    close("vrtt", p.vrtt(), 1.0 * 0.5 + 2.0 * 0.25 + 4.0 * 0.25, 1e-15)?;
    close("rvrtt(2)", p.rvrtt(2).map_err(|e| e.to_string())?, 2.0 * 0.25 + 4.0 * 0.25, 1e-15)?;
    let p = PathModel::new(vec![0.5, 1.5, 3.0, 9.0], vec![0.2, 0.4, 0.75, 0.0]).map_err(|e| e.to_string())?;
    let want = 0.5 * 0.8 + 1.5 * 0.2 * 0.6 + 3.0 * 0.2 * 0.4 * 0.25 + 9.0 * 0.2 * 0.4 * 0.75;
    close("four-hop vrtt", p.vrtt(), want, 1e-14)
}

pub const ORACLES: [(&str, fn() -> Check); 15] = [
    ("zipf head by summation", zipf_head_by_summation),
    ("zipf mass sums to one", zipf_mass_sums_to_one),
    ("zipf chi-square", zipf_frequencies_chi_square),
    ("exponential sample mean", exponential_sample_mean),
    ("tau grid scan", tau_equal_weights_grid_scan),
    ("tau monotone in x", tau_increases_with_cache_size),
    ("mixture two-term", mixture_two_term_value),
    ("mixture convexity grid", mixture_dominates_mean_grid),
    ("frozen high-precision values", frozen_high_precision_values),
    ("grid spot value", grid_spot_value),
    ("eta ratio limit", eta_ratio_limit),
    ("running stats two-pass", running_stats_two_pass),
    ("vrtt hand expansion", vrtt_hand_expansion),
    ("symmetric miss of the cache size rank", sym_at_cache_size),
    ("grid monotone in mean p", grid_monotone_in_mean_p),
];

pub fn sym_at_cache_size() -> Check {
    let got = miss_sym(8, 8, 2.0).map_err(|e| e.to_string())?;
    close("miss_sym(8, 8, 2)", got, (-1.0 / std::f64::consts::PI).exp(), 1e-13)
}

/// Checks that π_k is non-decreasing in the mean insertion probability over
/// {0.01, 0.1, 0.5, 1} for every rank up to `max_rank`.
pub fn grid_monotone_up_to(max_rank: u32) -> Check {
    let m = zipf_weights(20_000, 1.7).map_err(|e| e.to_string())?;
    let ps = [0.01, 0.1, 0.5, 1.0];
    let rows = miss_grid(8, &m, 1.0, &ps, max_rank).map_err(|e| e.to_string())?;
    for k in 1..=max_rank {
        let col: Vec<f64> = rows.iter().filter(|r| r.rank == k).map(|r| r.pi).collect();
        ensure(col.windows(2).all(|w| w[0] <= w[1]), || format!("rank {k}: {col:?}"))?;
    }
    Ok(())
}

/// Ranks 1..=7 are monotone; rank 8 peaks near p = 0.8 and dips by about
/// 1e-4 at p = 1 (values frozen from mpmath).
pub fn grid_monotone_in_mean_p() -> Check {
    grid_monotone_up_to(7)?;
    let m = zipf_weights(20_000, 1.7).map_err(|e| e.to_string())?;
    let rows = miss_grid(8, &m, 1.0, &[0.5, 1.0], 8).map_err(|e| e.to_string())?;
    close("pi_8 p=0.5", rows[7].pi, 0.739_574_393_746_141_3, 1e-7)?;
    close("pi_8 p=1", rows[15].pi, 0.739_476_675_885_654_9, 1e-7)
}
