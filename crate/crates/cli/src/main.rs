//! Command-line driver for the SDE stability laboratory.
//!
//! Subcommands dispatch to the library modules; every run writes its
//! artifacts into the output directory together with a single manifest
//! covering them (tool version, config hash, seed, wall clock, tolerances).
//!
//! Exit codes: 0 on success, 1 when an assumption check or experiment
//! verdict fails, 2 on usage or configuration errors.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use sde_stability::{
    certify_gaussian_bound, check_assumptions, density_estimate, epsilon_p, mollify,
    mollification_distance_bound, parse_config, probe_holder, probe_one_sided_lipschitz,
    run_stability_experiment, simulate_pair, ExperimentConfig, ExperimentSpec, GridSpec,
    IntegratorSpec, KdeSpec, PairSide, ToleranceSpec, Verdict, YwParams,
};
use sha2::{Digest, Sha256};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(name = "sde-stability", version, about = "Stability laboratory for 1-d SDEs with discontinuous drift")]
struct Cli {
    /// Experiment configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count override (results are identical for any value)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory override
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probe the standing assumptions on the configured coefficient pair
    Check,
    /// Mollify the configured coefficients and report preservation probes
    Mollify {
        /// Mollification order override
        #[arg(long)]
        n: Option<u32>,
    },
    /// Weighted norms of the coefficient differences and the distance epsilon_p
    Norm {
        #[arg(long)]
        p: Option<f64>,
    },
    /// Property report for the penalty functions
    YwValidate {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Transition-density expansion on a y-grid
    Density {
        #[arg(long)]
        t: Option<f64>,
        /// y-grid as lo:hi:count
        #[arg(long, value_name = "LO:HI:COUNT", allow_hyphen_values = true)]
        y_grid: Option<String>,
        /// Truncation order (0..=2)
        #[arg(long)]
        order: Option<u32>,
    },
    /// Coupled ensemble simulation with recorded error functionals
    Simulate {
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long)]
        paths: Option<u64>,
        /// Extra functionals to record, comma-separated tokens:
        /// `exit:R` (first-exit stopping rule), `time:T` (deterministic
        /// stopping time), `bv:THETA` (indicator above THETA), `full-paths`
        #[arg(long, value_name = "TOKENS")]
        record: Option<String>,
        /// Also write the per-path binary dump
        #[arg(long)]
        dump_paths: bool,
    },
    /// Stability-rate ladder with log-log fit against the theoretical exponent
    Rates,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

struct RunContext {
    cfg: ExperimentConfig,
    out_dir: PathBuf,
    started: Instant,
    files: Vec<String>,
    extra: serde_json::Map<String, serde_json::Value>,
}

impl RunContext {
    fn write_file(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_manifest(&mut self) -> anyhow::Result<()> {
        let canonical = self.cfg.serialize();
        let hash = hex_digest(canonical.as_bytes());
        let manifest = serde_json::json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "config_hash": hash,
            "master_seed": self.cfg.plan.seed,
            "started_unix": SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            "duration_secs": self.started.elapsed().as_secs_f64(),
            "tolerances": self.cfg.tolerances,
            "files": self.files,
            "extra": self.extra,
        });
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn load_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("--config <file> is required for this subcommand"))?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut cfg = parse_config(&text).map_err(|e| anyhow!("{e}"))?;
    if let Ok(profile) = std::env::var("SDE_STABILITY_TOLERANCE_PROFILE") {
        cfg.tolerances = ToleranceSpec::profile(&profile).map_err(|e| anyhow!("{e}"))?;
    }
    if let Some(seed) = cli.seed {
        cfg.plan.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.plan.workers = Some(w);
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.display().to_string();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    // yw-validate runs from bare flags when no config is given
    if let Command::YwValidate { delta, kappa } = &cli.command {
        if cli.config.is_none() {
            let delta = delta.ok_or_else(|| anyhow!("--delta required without --config"))?;
            let kappa = kappa.ok_or_else(|| anyhow!("--kappa required without --config"))?;
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            return yw_validate_bare(delta, kappa, &out);
        }
    }
    let cfg = load_config(&cli)?;
    let out_dir = PathBuf::from(&cfg.output.dir);
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output dir {}", out_dir.display()))?;
    let mut ctx = RunContext {
        cfg,
        out_dir,
        started: Instant::now(),
        files: Vec::new(),
        extra: serde_json::Map::new(),
    };
    let code = match cli.command {
        Command::Check => cmd_check(&mut ctx)?,
        Command::Mollify { n } => cmd_mollify(&mut ctx, n)?,
        Command::Norm { p } => cmd_norm(&mut ctx, p)?,
        Command::YwValidate { delta, kappa } => cmd_yw(&mut ctx, delta, kappa)?,
        Command::Density { t, y_grid, order } => cmd_density(&mut ctx, t, y_grid, order)?,
        Command::Simulate {
            steps,
            paths,
            record,
            dump_paths,
        } => cmd_simulate(&mut ctx, steps, paths, record, dump_paths)?,
        Command::Rates => cmd_rates(&mut ctx)?,
    };
    ctx.write_manifest()?;
    Ok(code)
}

fn cmd_check(ctx: &mut RunContext) -> anyhow::Result<i32> {
    let pair = ctx.cfg.build_pair().map_err(|e| anyhow!("{e}"))?;
    let p = match ctx.cfg.experiment {
        ExperimentSpec::Check { p } | ExperimentSpec::Norm { p } => p,
        _ => 1.0,
    };
    let grid = GridSpec::standard(&pair.measure());
    let report = check_assumptions(&pair, p, &grid).map_err(|e| anyhow!("{e}"))?;
    for c in &report.conditions {
        println!(
            "{} {} measured={:.6e} declared={} | {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.condition,
            c.measured,
            c.declared
                .map(|d| format!("{d:.6e}"))
                .unwrap_or_else(|| "-".into()),
            c.detail
        );
    }
    ctx.write_file("check_report.json", &serde_json::to_string_pretty(&report)?)?;
    Ok(if report.all_pass { 0 } else { 1 })
}

fn cmd_mollify(ctx: &mut RunContext, n_flag: Option<u32>) -> anyhow::Result<i32> {
    let pair = ctx.cfg.build_pair().map_err(|e| anyhow!("{e}"))?;
    let (n, grid_points) = match ctx.cfg.experiment {
        ExperimentSpec::Mollify { n, grid_points } => (n_flag.unwrap_or(n), grid_points),
        _ => (
            n_flag.ok_or_else(|| anyhow!("--n required unless the config declares a mollify experiment"))?,
            201,
        ),
    };
    ctx.cfg.experiment = ExperimentSpec::Mollify { n, grid_points };
    let quad = ctx.cfg.tolerances.quad();
    let b = &pair.exact.drift;
    let s = &pair.exact.diffusion;
    let bn = mollify(b, n, &quad).map_err(|e| anyhow!("{e}"))?;
    let sn = mollify(s, n, &quad).map_err(|e| anyhow!("{e}"))?;
    let measure = ctx.cfg.measure().map_err(|e| anyhow!("{e}"))?;
    let window = 3.0 / n as f64;
    let mut csv = String::from("x,drift,drift_mollified,diffusion,diffusion_mollified\n");
    for i in 0..grid_points {
        let x = -window + 2.0 * window * i as f64 / (grid_points - 1) as f64;
        csv.push_str(&format!(
            "{x},{},{},{},{}\n",
            b.eval_raw(x),
            bn.eval_raw(x),
            s.eval_raw(x),
            sn.eval_raw(x)
        ));
    }
    ctx.write_file("mollified.csv", &csv)?;

    let domain = (measure.x0 - 4.0, measure.x0 + 4.0);
    let osl = probe_one_sided_lipschitz(&bn, domain, 100_000, ctx.cfg.plan.seed)
        .map_err(|e| anyhow!("{e}"))?;
    let holder = s
        .holder_eta
        .map(|eta| probe_holder(&sn, eta, domain, 100_000, ctx.cfg.plan.seed))
        .transpose()
        .map_err(|e| anyhow!("{e}"))?;
    let bound = mollification_distance_bound(s, n, 1.0, &measure).ok();
    let report = serde_json::json!({
        "n": n,
        "drift_osl_probe": { "l_hat": osl.l_hat, "within_declared": osl.within_declared },
        "diffusion_holder_probe": holder.map(|h| serde_json::json!({
            "k_hat": h.k_hat, "within_declared": h.within_declared })),
        "diffusion_distance_bound_p1": bound,
    });
    ctx.write_file("mollify_report.json", &serde_json::to_string_pretty(&report)?)?;
    let ok = osl.within_declared.unwrap_or(true);
    Ok(if ok { 0 } else { 1 })
}

fn cmd_norm(ctx: &mut RunContext, p_flag: Option<f64>) -> anyhow::Result<i32> {
    let pair = ctx.cfg.build_pair().map_err(|e| anyhow!("{e}"))?;
    let p = p_flag.unwrap_or(match ctx.cfg.experiment {
        ExperimentSpec::Norm { p } => p,
        _ => 1.0,
    });
    ctx.cfg.experiment = ExperimentSpec::Norm { p };
    let measure = ctx.cfg.measure().map_err(|e| anyhow!("{e}"))?;
    let report = epsilon_p(&pair, p, &measure).map_err(|e| anyhow!("{e}"))?;
    let norm_b = report.drift_pow.powf(1.0 / p);
    let norm_sigma = report.diffusion_pow.powf(1.0 / (2.0 * p));
    let meets = report.meets_distance_condition && report.log_condition.unwrap_or(true);
    let csv = format!(
        "p,norm_b,norm_sigma,epsilon_p,meets_A_p\n{p},{norm_b},{norm_sigma},{},{}\n",
        report.epsilon, meets
    );
    print!("{csv}");
    ctx.write_file("norm.csv", &csv)?;
    Ok(0)
}

fn yw_report_lines(rep: &sde_stability::YwPropertyReport) -> String {
    let mut out = String::new();
    let line = |name: &str, ok: bool, detail: String| {
        format!("{} {name}: {detail}\n", if ok { "PASS" } else { "FAIL" })
    };
    out.push_str(&line(
        "sign structure phi'(x)/x",
        rep.sign_structure_ok,
        "positive beyond kappa/delta, zero inside".into(),
    ));
    out.push_str(&line(
        "|phi'| <= 1",
        rep.bounded_derivative_ok,
        format!("max |phi'| = {:.12}", rep.max_abs_phi_prime),
    ));
    out.push_str(&line(
        "|x| <= kappa + phi(x)",
        rep.majorant_ok,
        format!("min gap = {:.3e}", rep.min_majorant_gap),
    ));
    out.push_str(&line(
        "phi'' cap 2/(|x| log delta)",
        rep.cap_ok,
        format!(
            "max excess = {:.6e} at |x| = {:.6}",
            rep.max_cap_excess, rep.cap_excess_at
        ),
    ));
    out.push_str(&line(
        "psi integrates to 1",
        rep.mass_error <= 1e-6,
        format!("|mass - 1| = {:.3e}", rep.mass_error),
    ));
    out
}

fn yw_validate_bare(delta: f64, kappa: f64, out: &Path) -> anyhow::Result<i32> {
    std::fs::create_dir_all(out)?;
    let started = Instant::now();
    let params = YwParams::new(delta, kappa).map_err(|e| anyhow!("{e}"))?;
    let rep = params.property_report(10_000, 1e-9);
    print!("{}", yw_report_lines(&rep));
    std::fs::write(
        out.join("yw_report.json"),
        serde_json::to_string_pretty(&rep)?,
    )?;
    let manifest = serde_json::json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config_hash": hex_digest(format!("yw-validate {delta} {kappa}").as_bytes()),
        "started_unix": SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "duration_secs": started.elapsed().as_secs_f64(),
        "files": ["yw_report.json"],
    });
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(if rep.core_ok() && rep.cap_ok { 0 } else { 1 })
}

fn cmd_yw(ctx: &mut RunContext, delta: Option<f64>, kappa: Option<f64>) -> anyhow::Result<i32> {
    let (d, k) = match (&ctx.cfg.experiment, delta, kappa) {
        (_, Some(d), Some(k)) => (d, k),
        (ExperimentSpec::YwValidate { delta, kappa }, _, _) => (*delta, *kappa),
        _ => return Err(anyhow!("--delta/--kappa or a yw_validate experiment required")),
    };
    ctx.cfg.experiment = ExperimentSpec::YwValidate { delta: d, kappa: k };
    let params = YwParams::new(d, k).map_err(|e| anyhow!("{e}"))?;
    let rep = params.property_report(10_000, 1e-9);
    print!("{}", yw_report_lines(&rep));
    ctx.write_file("yw_report.json", &serde_json::to_string_pretty(&rep)?)?;
    Ok(if rep.core_ok() && rep.cap_ok { 0 } else { 1 })
}

fn cmd_density(
    ctx: &mut RunContext,
    t_flag: Option<f64>,
    y_grid: Option<String>,
    order_flag: Option<u32>,
) -> anyhow::Result<i32> {
    let pair = ctx.cfg.build_pair().map_err(|e| anyhow!("{e}"))?;
    let (mut t, mut y_min, mut y_max, mut y_count, mut order) = match ctx.cfg.experiment {
        ExperimentSpec::Density {
            t,
            y_min,
            y_max,
            y_count,
            order,
        } => (t, y_min, y_max, y_count, order),
        _ => (0.02, -0.5, 0.5, 51, 2),
    };
    if let Some(tv) = t_flag {
        t = tv;
    }
    if let Some(o) = order_flag {
        order = o;
    }
    if let Some(spec) = y_grid {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(anyhow!("--y-grid must be LO:HI:COUNT"));
        }
        y_min = parts[0].parse().context("y-grid LO")?;
        y_max = parts[1].parse().context("y-grid HI")?;
        y_count = parts[2].parse().context("y-grid COUNT")?;
    }
    ctx.cfg.experiment = ExperimentSpec::Density {
        t,
        y_min,
        y_max,
        y_count,
        order,
    };
    let spec = IntegratorSpec {
        seed: ctx.cfg.plan.seed,
        ..IntegratorSpec::default()
    };
    let mut csv = String::from("y,p_frozen,correction_1,correction_2,tail_bound,total\n");
    let mut any_low = false;
    for i in 0..y_count {
        let y = y_min + (y_max - y_min) * i as f64 / (y_count.max(2) - 1) as f64;
        let est = density_estimate(&pair, PairSide::Exact, t, y, pair.x0, order, &spec)
            .map_err(|e| anyhow!("{e}"))?;
        any_low |= est.low_precision;
        let c1 = est.corrections.first().map(|c| c.value).unwrap_or(0.0);
        let c2 = est.corrections.get(1).map(|c| c.value).unwrap_or(0.0);
        csv.push_str(&format!(
            "{y},{},{c1},{c2},{},{}\n",
            est.frozen, est.tail_bound, est.value
        ));
    }
    ctx.write_file("density.csv", &csv)?;
    ctx.extra
        .insert("low_precision".into(), serde_json::json!(any_low));
    Ok(0)
}

fn parse_record_tokens(spec: &str, record: &mut sde_stability::RecordSpec) -> anyhow::Result<()> {
    use sde_stability::{BvFunction, StoppingRule};
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.split_once(':') {
            Some(("exit", r)) => record.stopping.push(StoppingRule::FirstExit {
                radius: r.parse().context("exit radius")?,
            }),
            Some(("time", t)) => record.stopping.push(StoppingRule::Deterministic {
                time: t.parse().context("stopping time")?,
            }),
            Some(("bv", theta)) => record.bv.push(BvFunction::IndicatorAbove {
                threshold: theta.parse().context("bv threshold")?,
            }),
            None if token == "full-paths" => record.full_paths = true,
            _ => return Err(anyhow!("unknown record token `{token}`")),
        }
    }
    Ok(())
}

fn cmd_simulate(
    ctx: &mut RunContext,
    steps: Option<u32>,
    paths: Option<u64>,
    record: Option<String>,
    dump_flag: bool,
) -> anyhow::Result<i32> {
    let pair = ctx.cfg.build_pair().map_err(|e| anyhow!("{e}"))?;
    let mut plan = ctx.cfg.plan.to_plan().map_err(|e| anyhow!("{e}"))?;
    if let Some(s) = steps {
        plan.steps = s;
    }
    if let Some(p) = paths {
        plan.paths = p;
    }
    if let Some(tokens) = &record {
        parse_record_tokens(tokens, &mut plan.record)?;
    }
    plan.validate().map_err(|e| anyhow!("{e}"))?;
    ctx.cfg.plan.steps = plan.steps;
    ctx.cfg.plan.paths = plan.paths;
    ctx.cfg.plan.record = plan.record.clone();
    let ensemble = simulate_pair(&pair, &plan).map_err(|e| anyhow!("{e}"))?;
    let mut csv = String::from("functional,value,std_error,ci_lo,ci_hi,n\n");
    let mut push = |name: String, e: sde_stability::Estimate| {
        csv.push_str(&format!(
            "{name},{},{},{},{},{}\n",
            e.value, e.std_error, e.ci95.0, e.ci95.1, e.n
        ));
    };
    push("sup_error".into(), ensemble.sup_error());
    push("terminal_error".into(), ensemble.terminal_error());
    for i in 0..plan.record.stopping.len() {
        push(
            format!("stopped_{i}"),
            ensemble.stopped_error(i).map_err(|e| anyhow!("{e}"))?,
        );
    }
    for i in 0..plan.record.bv.len() {
        push(
            format!("bv_{i}"),
            ensemble.bv_error(i, 1.0).map_err(|e| anyhow!("{e}"))?,
        );
    }
    ctx.write_file("aggregates.csv", &csv)?;

    if dump_flag || ctx.cfg.output.dump_paths {
        let mut buf: Vec<u8> = Vec::new();
        // header: magic, version, paths, steps (little endian)
        buf.extend_from_slice(b"SDEP");
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&plan.paths.to_le_bytes());
        buf.extend_from_slice(&(plan.steps as u64).to_le_bytes());
        // per-path records: sup, terminal, x_T, xh_T, stopped..., bv pairs
        for r in &ensemble.records {
            for v in [r.sup_error, r.terminal_error, r.x_terminal, r.xh_terminal] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            for v in &r.stopped_errors {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            for (a, b) in &r.bv_values {
                buf.extend_from_slice(&a.to_le_bytes());
                buf.extend_from_slice(&b.to_le_bytes());
            }
        }
        let path = ctx.out_dir.join("paths.bin");
        let mut f = std::fs::File::create(&path)?;
        f.write_all(&buf)?;
        ctx.files.push("paths.bin".into());
    }

    // density-bound certification is cheap once the ensemble exists
    if ensemble.records.len() >= 1000 {
        let samples = ensemble.terminal_values(PairSide::Exact);
        if let Ok(fit) = certify_gaussian_bound(
            &samples,
            pair.t_horizon,
            pair.x0,
            pair.effective_lambda(),
            &KdeSpec::default(),
        ) {
            ctx.extra
                .insert("gaussian_bound_c_hat".into(), serde_json::json!(fit.c_hat));
        }
    }
    Ok(0)
}

fn cmd_rates(ctx: &mut RunContext) -> anyhow::Result<i32> {
    let cfg = ctx.cfg.rate_config().map_err(|e| anyhow!("{e}"))?;
    let fit = run_stability_experiment(&cfg).map_err(|e| anyhow!("{e}"))?;
    let mut csv = String::from("n,epsilon,error,error_se,log_eps,log_err\n");
    for p in &fit.points {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.n,
            p.epsilon,
            p.error,
            p.error_std_error,
            p.epsilon.ln(),
            p.error.ln()
        ));
    }
    ctx.write_file("rates.csv", &csv)?;
    ctx.write_file("fit.json", &serde_json::to_string_pretty(&fit)?)?;
    ctx.write_file("plot_rates.py", PLOT_SCRIPT)?;
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "slope = {:.4} (se {:.4}), r^2 = {:.4}, theoretical = {:?}, verdict = {:?}",
        fit.slope, fit.slope_std_error, fit.r_squared, fit.theoretical, fit.verdict
    );
    if let Some(d) = &fit.grid_doubling {
        println!(
            "grid doubling at n = {}: {:.4} -> {:.4} (rel change {:.3e})",
            d.n, d.error_base, d.error_doubled, d.rel_change
        );
    }
    Ok(match fit.verdict {
        Verdict::Consistent => 0,
        _ => 1,
    })
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render the rate fit from rates.csv (written next to this script)."""
import csv
import math
import os
import sys

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "rates.csv"))))
eps = [float(r["epsilon"]) for r in rows]
err = [float(r["error"]) for r in rows]

try:
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; data summary only", file=sys.stderr)
    for r in rows:
        print(r)
    sys.exit(0)

fig, ax = plt.subplots(figsize=(5, 4))
ax.loglog(eps, err, "o-", label="measured")
n = len(eps)
lx = [math.log(e) for e in eps]
ly = [math.log(e) for e in err]
mx, my = sum(lx) / n, sum(ly) / n
slope = sum((x - mx) * (y - my) for x, y in zip(lx, ly)) / sum((x - mx) ** 2 for x in lx)
b = my - slope * mx
ax.loglog(eps, [math.exp(b) * e ** slope for e in eps], "--",
          label=f"fit slope {slope:.3f}")
ax.set_xlabel("coefficient distance")
ax.set_ylabel("error")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "rates.png"), dpi=150)
print("wrote rates.png")
"#;
