use std::io::Write;

use super::che::{miss_asym, solve_tau};
use super::sym::miss_sym;
use crate::error::Result;
use crate::workload::PopularityModel;

/// One point of a model curve: miss probability of `rank` at `mean_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelRow {
    pub rank: u32,
    pub mean_p: f64,
    pub pi: f64,
    pub tau_x: f64,
}

/// Asymmetric-insertion miss curves for ranks `1..=max_rank`, one block per
/// mean insertion probability.
pub fn miss_grid(
    x: usize,
    model: &PopularityModel,
    lambda: f64,
    mean_ps: &[f64],
    max_rank: u32,
) -> Result<Vec<ModelRow>> {
    let max_rank = max_rank.min(model.catalog_size() as u32);
    let mut rows = Vec::with_capacity(mean_ps.len() * max_rank as usize);
    for &p in mean_ps {
        let sol = solve_tau(x, lambda, model, p)?;
        rows.extend((1..=max_rank).map(|k| ModelRow {
            rank: k,
            mean_p: p,
            pi: miss_asym(lambda * model.q(k), sol.tau_x, p),
            tau_x: sol.tau_x,
        }));
    }
    Ok(rows)
}

/// Symmetric p-LRU curve. It does not depend on the mean probability, so
/// `mean_p` is written as NaN and `tau_x` is left empty.
pub fn sym_curve(x: usize, alpha: f64, max_rank: u32) -> Result<Vec<ModelRow>> {
    (1..=max_rank)
        .map(|k| {
            Ok(ModelRow {
                rank: k,
                mean_p: f64::NAN,
                pi: miss_sym(k, x, alpha)?,
                tau_x: f64::NAN,
            })
        })
        .collect()
}

/// Writes `rank,mean_p,pi,tau_x` rows after a schema comment line.
pub fn write_model_csv<W: Write>(out: W, rows: &[ModelRow], comment: &str) -> Result<()> {
    let mut out = out;
    writeln!(out, "# {comment}").map_err(|source| crate::Error::Io {
        path: "<model csv>".into(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "mean_p", "pi", "tau_x"])?;
    for r in rows {
        w.write_record([
            r.rank.to_string(),
            fmt_opt(r.mean_p),
            format!("{:.9}", r.pi),
            fmt_opt(r.tau_x),
        ])?;
    }
    w.flush().map_err(|source| crate::Error::Io {
        path: "<model csv>".into(),
        source,
    })?;
    Ok(())
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6}")
    }
}
