//! `lacsim`: runs cache-network simulations and the analytical miss models.
//!
//! Exit codes: 0 on success, 1 on usage or runtime errors, 2 when `compare`
//! finds the simulation outside the model tolerance.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lac_core::analytics::{eta_asym, eta_sym, miss_grid, solve_tau, sym_curve, write_model_csv};
use lac_core::experiment::{calibrate_lcp, edge_cache, max_abs_deviation, predicted_miss, simulated_miss};
use lac_core::metrics::MetricsReport;
use lac_core::netsim::{preset, run_with_limits, PolicyChoice, RunLimits, ScenarioConfig, PRESET_NAMES};
use lac_core::workload::zipf_weights;

/// Largest per-rank deviation `compare` accepts.
const COMPARE_TOLERANCE: f64 = 0.05;
const COMPARE_RANKS: u32 = 20;

#[derive(Parser)]
#[command(name = "lacsim", version, about = "Latency-aware caching simulator and model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a preset or a TOML scenario and write CSV reports
    Sim(SimArgs),
    /// Evaluate the characteristic-time and symmetric models
    Model(ModelArgs),
    /// Simulate and compare edge-cache miss probabilities with the model
    Compare(CompareArgs),
    /// Run one simulation per parameter value and seed
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Built-in scenario: single, line or tree
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    /// lru, lcp[:p], sym:p, sym-la[:beta,gamma] or lac[:beta,gamma]
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Total number of user requests
    #[arg(long)]
    horizon: Option<u64>,
    /// Cache statistics ignore the first N requests
    #[arg(long)]
    warmup: Option<u64>,
    /// Stop a run after this many seconds of wall-clock time
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, env = "LACSIM_OUTDIR", default_value = "lacsim-out")]
    outdir: PathBuf,
    /// Run LAC first and use its mean decision probability for LCP
    #[arg(long)]
    calibrate_lcp: bool,
    /// Also write sliding-window delivery statistics over this many completions
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    window: Option<u64>,
}

#[derive(Args)]
struct ModelArgs {
    /// Cache size in objects
    #[arg(long, default_value_t = 8)]
    x: usize,
    /// Catalog size
    #[arg(long = "catalog", default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = 1.7)]
    alpha: f64,
    /// Aggregate request rate
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.1, 0.5, 1.0])]
    mean_p: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    max_rank: u32,
    /// Miss-probability threshold of the occupancy table
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, env = "LACSIM_OUTDIR", default_value = "lacsim-out")]
    outdir: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    Seed,
    Beta,
    Gamma,
    LcpP,
    Alpha,
    Horizon,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    param: SweepParam,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Seeds to replicate every value with
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long, env = "LACSIM_OUTDIR", default_value = "lacsim-out")]
    outdir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Sim(a) => cmd_sim(a),
        Command::Model(a) => cmd_model(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// A scenario with every command-line override applied, plus the parsed
/// policy name when one was given.
struct Scenario {
    cfg: ScenarioConfig,
    choice: Option<PolicyChoice>,
    limits: RunLimits,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<Scenario> {
        let mut cfg = match (&self.preset, &self.config) {
            (Some(name), None) => preset(name)
                .with_context(|| format!("known presets: {}", PRESET_NAMES.join(", ")))?,
            (None, Some(path)) => ScenarioConfig::from_file(path)?,
            _ => bail!("give exactly one of --preset or --config"),
        };
        let choice = match &self.policy {
            Some(s) => Some(s.parse::<PolicyChoice>()?),
            None => None,
        };
        if let Some(c) = &choice {
            let policy = c.resolve(&cfg.defaults);
            cfg = cfg.with_policy(policy);
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(w) = self.warmup {
            cfg.warmup_requests = w;
        }
        let wall_clock = match self.time_limit {
            Some(t) if t > 0.0 && t.is_finite() => Some(Duration::from_secs_f64(t)),
            Some(t) => bail!("--time-limit must be positive, got {t}"),
            None => None,
        };
        cfg.validate()?;
        Ok(Scenario {
            cfg,
            choice,
            limits: RunLimits { wall_clock },
        })
    }
}

fn run_scenario(cfg: &ScenarioConfig, limits: RunLimits) -> Result<MetricsReport> {
    let report = run_with_limits(cfg, limits)?;
    if report.truncated {
        eprintln!("warning: run stopped at the wall-clock limit after {} requests", report.issued);
    }
    Ok(report)
}

fn print_summary(r: &MetricsReport) {
    let loads: Vec<String> = (0..r.links.len()).map(|l| format!("{:.3}", r.link_load(l))).collect();
    println!(
        "policy={} seed={} requests={} mean_delivery={:.4} stddev_delivery={:.4} overall_miss={:.4} mean_decision_prob={} link_loads=[{}]",
        r.policy,
        r.seed,
        r.issued,
        r.mean_delivery(),
        r.stddev_delivery(),
        r.overall_miss(),
        r.mean_decision_prob().map_or("-".into(), |p| format!("{p:.4}")),
        loads.join(",")
    );
}

fn cmd_sim(a: SimArgs) -> Result<ExitCode> {
    let Scenario { mut cfg, choice, limits } = a.scenario.resolve()?;
    if a.calibrate_lcp {
        if !matches!(choice, None | Some(PolicyChoice::Lcp(None))) {
            bail!("--calibrate-lcp sets the LCP probability itself; use --policy lcp or omit --policy");
        }
        let (lac, p) = calibrate_lcp(&cfg)?;
        print_summary(&lac);
        lac.export_csv(&a.outdir.join("lac"))?;
        println!("calibrated lcp p={p:.6}");
        let lcp = PolicyChoice::Lcp(Some(p)).resolve(&cfg.defaults);
        cfg = cfg.with_policy(lcp);
    }
    let report = run_scenario(&cfg, limits)?;
    print_summary(&report);
    for path in report.export_csv(&a.outdir)? {
        println!("wrote {}", path.display());
    }
    if let Some(w) = a.window {
        let path = report.export_window_csv(&a.outdir, w as usize)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn write_csv_file(path: &Path, write: impl FnOnce(fs::File) -> lac_core::Result<()>) -> Result<()> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write(f)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_model(a: ModelArgs) -> Result<ExitCode> {
    if a.mean_p.is_empty() {
        bail!("--mean-p needs at least one value");
    }
    let model = zipf_weights(a.n, a.alpha)?;
    let rows = miss_grid(a.x, &model, a.lambda, &a.mean_p, a.max_rank)?;
    fs::create_dir_all(&a.outdir).with_context(|| format!("creating {}", a.outdir.display()))?;
    let comment = format!("lacsim model x={} N={} alpha={} lambda={}", a.x, a.n, a.alpha, a.lambda);

    write_csv_file(&a.outdir.join("model_asym.csv"), |f| write_model_csv(f, &rows, &comment))?;
    if a.alpha <= 1.0 {
        println!("alpha <= 1: symmetric closed forms skipped");
        return Ok(ExitCode::SUCCESS);
    }
    let sym = sym_curve(a.x, a.alpha, a.max_rank)?;
    write_csv_file(&a.outdir.join("model_sym.csv"), |f| write_model_csv(f, &sym, &comment))?;

    let path = a.outdir.join("eta.csv");
    let mut text = format!("# {comment} eps={}\nmean_p,tau_x,eta_asym,eta_sym,ratio\n", a.eps);
    let es = eta_sym(a.x, a.alpha, a.eps)?;
    for &p in &a.mean_p {
        let tau = solve_tau(a.x, a.lambda, &model, p)?.tau_x;
        let ea = eta_asym(a.lambda, model.norm_c(), tau, p, a.eps, a.alpha)?;
        text.push_str(&format!("{p},{tau:.6},{ea:.6},{es:.6},{:.6}\n", ea / es));
    }
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(a: CompareArgs) -> Result<ExitCode> {
    let Scenario { cfg, limits, .. } = a.scenario.resolve()?;
    let node = edge_cache(&cfg).context("scenario has no cache next to the users")?;
    let predicted = predicted_miss(&cfg, &cfg.policy, COMPARE_RANKS)?;
    let report = run_scenario(&cfg, limits)?;
    let simulated = simulated_miss(&report, node, COMPARE_RANKS);

    println!("rank,simulated,model");
    for k in 0..COMPARE_RANKS as usize {
        let s = simulated[k].map_or(String::new(), |v| format!("{v:.4}"));
        let m = predicted.as_ref().map_or(String::new(), |p| format!("{:.4}", p[k]));
        println!("{},{s},{m}", k + 1);
    }
    let Some(predicted) = predicted else {
        println!("policy {} has no closed-form model; not gated", cfg.policy);
        return Ok(ExitCode::SUCCESS);
    };
    let model: Vec<Option<f64>> = predicted.into_iter().map(Some).collect();
    let dev = max_abs_deviation(&simulated, &model);
    let ok = dev <= COMPARE_TOLERANCE;
    println!(
        "max deviation {dev:.4} (tolerance {COMPARE_TOLERANCE}) {}",
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn apply_param(cfg: &mut ScenarioConfig, choice: Option<PolicyChoice>, param: SweepParam, v: f64) -> Result<()> {
    match param {
        SweepParam::Seed => cfg.seed = v as u64,
        SweepParam::Horizon => cfg.horizon = v as u64,
        SweepParam::Alpha => cfg.alpha = v,
        SweepParam::Beta => cfg.defaults.beta = v,
        SweepParam::Gamma => cfg.defaults.gamma = v,
        SweepParam::LcpP => cfg.defaults.lcp_p = v,
    }
    // defaults only matter through the policy name, so re-resolve it
    let choice = choice.unwrap_or(PolicyChoice::Lac(None));
    if matches!(param, SweepParam::Beta | SweepParam::Gamma | SweepParam::LcpP) {
        let policy = choice.resolve(&cfg.defaults);
        *cfg = cfg.clone().with_policy(policy);
    }
    cfg.validate()?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<ExitCode> {
    let Scenario { cfg, choice, limits } = a.scenario.resolve()?;
    let seeds = if a.seeds.is_empty() { vec![cfg.seed] } else { a.seeds.clone() };
    // build every run first so a bad value fails before any simulation
    let mut runs = Vec::new();
    for &v in &a.values {
        for &seed in &seeds {
            let mut c = cfg.clone();
            c.seed = seed;
            apply_param(&mut c, choice, a.param, v).with_context(|| format!("value {v}"))?;
            runs.push((v, c));
        }
    }
    fs::create_dir_all(&a.outdir).with_context(|| format!("creating {}", a.outdir.display()))?;
    let param = a.param.to_possible_value().map(|p| p.get_name().to_owned()).unwrap_or_default();
    let mut table = format!("{param},seed,policy,mean_delivery,stddev_delivery,overall_miss,mean_decision_prob\n");
    for (i, (v, c)) in runs.iter().enumerate() {
        let report = run_scenario(c, limits)?;
        report.export_csv(&a.outdir.join(format!("run-{i:03}")))?;
        let row = format!(
            "{v},{},{},{:.6},{:.6},{:.6},{}\n",
            c.seed,
            report.policy,
            report.mean_delivery(),
            report.stddev_delivery(),
            report.overall_miss(),
            report.mean_decision_prob().map_or(String::new(), |p| format!("{p:.6}"))
        );
        print!("{row}");
        table.push_str(&row);
    }
    let path = a.outdir.join("sweep.csv");
    fs::write(&path, table).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}
