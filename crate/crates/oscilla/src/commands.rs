//! Subcommand dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use oscilla_core::criteria::{
    first_zero_scan, first_zero_test, hille_nehari_gap, oscillation_test, sufficient_conditions, CriterionReport,
};
use oscilla_core::critical;
use oscilla_core::gaps::{gap_sweep, verify_gap_bound};
use oscilla_core::spectral::{index_lower_bound, superexp_estimate};
use oscilla_core::volterra::{riccati_track, solve_ivp, solve_until_zeros};
use rayon::prelude::*;

use crate::acceptance;
use crate::config::ExperimentConfig;
use crate::output::{self, num, opt, write_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Solve,
    Critical,
    Criteria,
    Gaps,
    Spectral,
    Verify,
}

#[derive(Debug, Clone)]
pub struct RunContext {
    pub out: PathBuf,
    pub seed: u64,
}

/// Files written, lines for the terminal, and whether the run succeeded.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub success: bool,
}

impl Outcome {
    fn ok() -> Self {
        Self {
            success: true,
            ..Self::default()
        }
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    fs::create_dir_all(&ctx.out).with_context(|| format!("cannot create output directory {}", ctx.out.display()))?;
    match cmd {
        Command::Solve => solve(cfg, &ctx.out),
        Command::Critical => critical_cmd(cfg, &ctx.out),
        Command::Criteria => criteria(cfg, &ctx.out),
        Command::Gaps => gaps(cfg, &ctx.out),
        Command::Spectral => spectral(cfg, &ctx.out),
        Command::Verify => verify(ctx),
    }
}

fn solve(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let (v, a) = (cfg.volume()?, cfg.potential()?);
    let opts = cfg.solver_options();
    let s = &cfg.solve;
    let track = match (s.zeros, s.horizon) {
        (Some(n), h) => solve_until_zeros(&v, &a, s.z0, n, h.unwrap_or(10.0), s.horizon_cap, &opts),
        (None, Some(h)) => solve_ivp(&v, &a, s.z0, h, &opts),
        (None, None) => return Err(cfg.error("solve.horizon", "give `horizon` or `zeros`").into()),
    }
    .context("solve failed")?;
    let track = riccati_track(&track, opts.near_zero_mask);
    let mut o = Outcome::ok();
    let tp = out.join("track.csv");
    write_csv(&tp, &output::TRACK_HEADER, output::track_rows(&track, s.stride))?;
    let zp = out.join("zeros.csv");
    write_csv(&zp, &output::ZEROS_HEADER, output::zero_rows(&track))?;
    o.files.extend([tp, zp]);
    let d = &track.diagnostics;
    o.lines.push(format!(
        "{} zeros on [0, {}]; residual {}; stability {}",
        track.zeros.len(),
        num(track.end()),
        sci(d.residual),
        sci(d.stability)
    ));
    Ok(o)
}

fn critical_cmd(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let v = cfg.volume()?;
    let env = cfg.envelope()?;
    let c = &cfg.critical;
    let decades = (c.t_hi / c.t_lo).log10();
    let n = ((decades * c.points_per_decade as f64).ceil() as usize).max(1);
    let ts: Vec<f64> = (0..=n)
        .map(|k| c.t_lo * (c.t_hi / c.t_lo).powf(k as f64 / n as f64))
        .collect();
    let rows: Vec<Vec<String>> = ts
        .par_iter()
        .map(|&t| -> Result<Vec<String>> {
            let chi = critical::chi(&v, t, c.upper).map(Some).or_else(divergent_as_none)?;
            let tail = critical::tail_integral(&v, t, c.upper)?;
            let (cf, ct) = match &env {
                Some(e) if t > e.lower_limit() => (Some(critical::chi_f(e, t)?), Some(critical::chi_tilde_f(e, t)?)),
                _ => (None, None),
            };
            Ok(vec![num(t), opt(chi), opt(cf), opt(ct), num(tail)])
        })
        .collect::<Result<_>>()
        .context("critical curve evaluation failed")?;
    let p = out.join("critical.csv");
    write_csv(&p, &output::CRITICAL_HEADER, rows)?;
    let mut o = Outcome::ok();
    o.lines
        .push(format!("{} points on [{}, {}]", ts.len(), num(c.t_lo), num(c.t_hi)));
    o.files.push(p);
    Ok(o)
}

fn sci(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.2e}")).unwrap_or_else(|| String::from("n/a"))
}

fn divergent_as_none(e: oscilla_core::Error) -> oscilla_core::Result<Option<f64>> {
    match e {
        oscilla_core::Error::Divergent { .. } => Ok(None),
        other => Err(other),
    }
}

fn criteria(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let (v, a) = (cfg.volume()?, cfg.potential()?);
    let env = cfg.envelope()?;
    let k = &cfg.criteria;
    let opts = k.options();
    let mut reports: Vec<CriterionReport> = Vec::new();
    match (k.t_start, k.t_end) {
        (Some(t0), Some(t1)) => reports.push(first_zero_test(&v, &a, t0, t1, &opts)?),
        (None, Some(t1)) => reports.push(first_zero_scan(&v, &a, t1, k.scan_points, &opts)?),
        _ => {}
    }
    reports.push(oscillation_test(&v, &a, k.horizon, &opts).context("oscillation test")?);
    reports.extend(sufficient_conditions(&v, &a, env.as_ref(), k.horizon, &opts).context("sufficient conditions")?);
    reports.push(hille_nehari_gap(&v, &a, k.horizon, &opts).context("Hille-Nehari comparison")?);
    let jp = out.join("criteria.json");
    output::write_criteria_json(&jp, &reports)?;
    let sp = out.join("criteria_series.csv");
    write_csv(&sp, &output::CRITERIA_SERIES_HEADER, output::series_rows(&reports))?;
    let mut o = Outcome::ok();
    for r in &reports {
        o.lines.push(format!(
            "{:<12} {:<12} lhs {} rhs {}",
            r.id,
            r.verdict.as_str(),
            num(r.lhs),
            num(r.rhs)
        ));
    }
    o.files.extend([jp, sp]);
    Ok(o)
}

fn gaps(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let (v, a) = (cfg.volume()?, cfg.potential()?);
    let g = &cfg.gaps;
    let taus = g.tau_grid();
    if taus.is_empty() {
        return Err(cfg.error("gaps.taus", "a τ grid is required").into());
    }
    let opts = g.options(cfg.solver_options());
    let env = cfg.envelope()?;
    let mut o = Outcome::ok();
    let (records, bound) = match (g.c, env) {
        (Some(c), Some(env)) => {
            let ver = verify_gap_bound(&v, &a, &env, c, &taus, &opts)?;
            o.lines.push(format!(
                "top-decade max T2/τ = {} against bound {} ({})",
                num(ver.empirical),
                num(ver.bound),
                if ver.passed { "within" } else { "exceeded" }
            ));
            o.success = ver.passed;
            (ver.records, Some(ver.bound))
        }
        (Some(_), None) => return Err(cfg.error("gaps.c", "the gap bound needs an [envelope] section").into()),
        (None, _) => (gap_sweep(&v, &a, &taus, &opts)?.1, None),
    };
    let p = out.join("gaps.csv");
    write_csv(&p, &output::GAPS_HEADER, output::gap_rows(&records, bound))?;
    o.lines.push(format!("{} gap records", records.len()));
    o.files.push(p);
    Ok(o)
}

fn spectral(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let sp = &cfg.spectral;
    let opts = sp.options(cfg.solver_options());
    let mut o = Outcome::ok();
    if sp.r.is_none() && sp.index_r.is_none() {
        return Err(cfg
            .error("spectral", "give an `r` grid, an `index_r` grid, or both")
            .into());
    }
    if let Some(rs) = &sp.r {
        let ests = rs
            .par_iter()
            .map(|&r| superexp_estimate(sp.m, sp.a, sp.alpha, sp.beta, r, &opts).with_context(|| format!("R = {r}")))
            .collect::<Result<Vec<_>>>()?;
        let p = out.join("spectral.csv");
        write_csv(&p, &output::SPECTRAL_HEADER, ests.iter().map(output::spectral_row))?;
        o.lines.push(format!("{} spectral estimates", ests.len()));
        o.files.push(p);
    }
    if let Some(rs) = &sp.index_r {
        let (v, a) = (cfg.volume()?, cfg.potential()?);
        let env = cfg
            .envelope()?
            .ok_or_else(|| anyhow!(cfg.error("envelope", "index counting needs an [envelope] section")))?;
        let c =
            sp.c.ok_or_else(|| anyhow!(cfg.error("spectral.c", "index counting needs `c`")))?;
        let counts = index_lower_bound(&v, &a, &env, c, rs, &opts.solver)?;
        let p = out.join("index.csv");
        write_csv(&p, &output::INDEX_HEADER, output::index_rows(&counts))?;
        o.lines.push(format!("{} index counts", counts.len()));
        o.files.push(p);
    }
    Ok(o)
}

fn verify(ctx: &RunContext) -> Result<Outcome> {
    let results = acceptance::run_all(ctx.seed);
    let mut o = Outcome::ok();
    for r in &results {
        o.lines.push(r.line());
    }
    o.success = results.iter().all(|r| r.passed);
    let p = ctx.out.join("verify.csv");
    write_csv(
        &p,
        &output::VERIFY_HEADER,
        results.iter().map(|r| {
            vec![
                r.id.to_string(),
                r.name.to_string(),
                if r.passed { "PASS" } else { "FAIL" }.to_string(),
                r.detail.clone(),
            ]
        }),
    )?;
    o.files.push(p);
    if !o.success {
        let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
        o.lines.push(format!("failed criteria: {}", failed.join(", ")));
    }
    Ok(o)
}

/// Whether the subcommand reads `[volume]`/`[potential]` and friends.
pub fn needs_config(cmd: Command) -> bool {
    cmd != Command::Verify
}
