//! Acceptance suite: nine numbered criteria, each reported as PASS or FAIL
//! with the measured quantities.

use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

use anyhow::Result;
use oscilla_core::criteria::{sufficient_conditions, CriteriaOptions, Verdict};
use oscilla_core::critical::{self, CriticalCurve};
use oscilla_core::gaps::{verify_gap_bound, GapOptions};
use oscilla_core::quadrature::{integrate, QuadOptions};
use oscilla_core::spectral::{
    hypothesis_potential, index_lower_bound, principale_constant, superexp_estimate, SpectralOptions,
};
use oscilla_core::volterra::{
    continuity_ratio, flux_lipschitz_ratio, solve_ivp, solve_until_zeros, sturm_compare, SolverOptions,
};
use oscilla_core::{make_model, CoefficientProfile, GrowthEnvelope, ModelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {:<28} {} ({:.2} s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// Diagnostics of one solve, gathered for the integrity criterion.
#[derive(Debug, Clone)]
struct SolveCheck {
    label: String,
    residual: Option<f64>,
    /// `None` for regular starts, which need no regularization.
    stability: Option<Option<f64>>,
}

#[derive(Default)]
struct Log(Mutex<Vec<SolveCheck>>);

impl Log {
    fn push(&self, label: impl Into<String>, residual: Option<f64>, stability: Option<Option<f64>>) {
        self.0.lock().expect("log poisoned").push(SolveCheck {
            label: label.into(),
            residual,
            stability,
        });
    }

    fn regularized(&self, label: impl Into<String>, d: &oscilla_core::volterra::Diagnostics) {
        self.push(label, d.residual, Some(d.stability));
    }
}

const TOL: f64 = 1e-6;

fn euclid(m: u32) -> CoefficientProfile {
    make_model(ModelKind::Euclidean { m }).expect("valid dimension")
}

fn capped_power(c: f64, p: f64) -> Result<CoefficientProfile> {
    Ok(CoefficientProfile::power(c, -p)?.clamped_below(1.0)?)
}

fn euler_ratio() -> f64 {
    (2.0 * PI / 3f64.sqrt()).exp()
}

fn c1_euler(log: &Log) -> Result<(bool, String)> {
    let v = euclid(3);
    let opts = SolverOptions::default();
    let sub = solve_ivp(&v, &capped_power(0.16, 2.0)?, 1.0, 1e3, &opts)?;
    log.regularized("c1 H=0.4", &sub.diagnostics);
    let sup = solve_until_zeros(&v, &capped_power(1.0, 2.0)?, 1.0, 5, 10.0, 1e9, &opts)?;
    log.regularized("c1 H=1", &sup.diagnostics);
    let target = euler_ratio();
    let ratios: Vec<f64> = sup.zeros.windows(2).map(|w| w[1].location / w[0].location).collect();
    let worst = ratios.iter().map(|r| (r / target - 1.0).abs()).fold(0.0, f64::max);
    let ok = sub.zeros.is_empty() && sup.zeros.len() >= 5 && worst <= 0.01;
    Ok((
        ok,
        format!(
            "H=0.4: {} zeros on [0,1e3]; H=1: {} zeros, worst ratio error {:.2e} against {:.4}",
            sub.zeros.len(),
            sup.zeros.len(),
            worst,
            target
        ),
    ))
}

fn c2_hyperbolic(log: &Log) -> Result<(bool, String)> {
    let v = make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 })?;
    let opts = SolverOptions::default();
    let a45 = CoefficientProfile::coth(0.45 * 0.45, 1.0)?.clamped_below(1.0)?;
    let sub = solve_ivp(&v, &a45, 1.0, 200.0, &opts)?;
    log.regularized("c2 H=0.45", &sub.diagnostics);
    let min_z = sub.z_values().into_iter().fold(f64::INFINITY, f64::min);
    let a60 = CoefficientProfile::coth(0.6 * 0.6, 1.0)?.clamped_below(1.0)?;
    let sup = solve_ivp(&v, &a60, 1.0, 200.0, &opts)?;
    log.regularized("c2 H=0.6", &sup.diagnostics);
    let reps = sufficient_conditions(&v, &a60, None, 200.0, &CriteriaOptions::default())?;
    let iii = reps
        .iter()
        .find(|r| r.id == "item_iii")
        .ok_or_else(|| anyhow::anyhow!("item (iii) missing from the report"))?;
    let err = (iii.lhs / 1.2 - 1.0).abs();
    let ok =
        sub.zeros.is_empty() && min_z > 0.0 && sup.zeros.len() >= 3 && iii.verdict == Verdict::Holds && err <= 0.02;
    Ok((
        ok,
        format!(
            "H=0.45: min z {:.3e}, {} zeros; H=0.6: {} zeros, item iii {:.4} ({}), error {:.2e}",
            min_z,
            sub.zeros.len(),
            sup.zeros.len(),
            iii.lhs,
            iii.verdict.as_str(),
            err
        ),
    ))
}

fn c3_gaps(log: &Log) -> Result<(bool, String)> {
    let env = GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0)?;
    let v = CoefficientProfile::growth(env);
    let a = CoefficientProfile::constant(1.0)?;
    let opts = SolverOptions::default();
    let tr = solve_ivp(&v, &a, 1.0, 200.0, &opts)?;
    log.regularized("c3 spacing", &tr.diagnostics);
    let s = 2.0 * PI / 3f64.sqrt();
    let worst = tr
        .zeros
        .windows(2)
        .map(|w| ((w[1].location - w[0].location) / s - 1.0).abs())
        .fold(0.0, f64::max);
    let n = 13;
    let taus: Vec<f64> = (0..n).map(|k| 10.0 * 100f64.powf(k as f64 / (n - 1) as f64)).collect();
    let ver = verify_gap_bound(&v, &a, &env, 2.0, &taus, &GapOptions::default())?;
    log.regularized("c3 gap sweep", &ver.diagnostics);
    // Consecutive zeros are s apart, so T2 − τ < 2s and T2/τ < 1 + 2s/τ.
    let top = taus[n - 1] / 10.0;
    let near_one = 1.0 + 2.0 * s / top;
    let ok = tr.zeros.len() >= 2
        && worst <= 1e-3
        && ver.bound == 9.0
        && ver.empirical <= ver.bound
        && ver.empirical <= near_one;
    Ok((
        ok,
        format!(
            "{} zeros, worst spacing error {:.2e}; top-decade max T2/τ {:.4} (bound {}, approach threshold {:.4})",
            tr.zeros.len(),
            worst,
            ver.empirical,
            ver.bound,
            near_one
        ),
    ))
}

fn c4_constant() -> Result<(bool, String)> {
    let s2 = 2f64.sqrt();
    let p = principale_constant(1.0, 2.0, 0.0)?;
    let cs = p.c_star.unwrap_or(f64::NAN);
    let e_val = (p.value - (17.0 + 12.0 * s2)).abs();
    let e_c = (cs - (1.0 + s2)).abs();
    let mut exact = true;
    for a in [0.5, 1.0, 2.0, 3.0] {
        exact &= principale_constant(a, 1.0, 0.0)?.value == a * a / 4.0;
    }
    let ok = e_val <= 1e-9 && e_c <= 1e-9 && exact;
    Ok((
        ok,
        format!(
            "value {:.12} (error {e_val:.1e}), c* {cs:.12} (error {e_c:.1e}), α=1 exact: {exact}",
            p.value
        ),
    ))
}

fn c5_spectral(log: &Log) -> Result<(bool, String)> {
    let rs = [20.0, 30.0, 40.0, 50.0];
    let opts = SpectralOptions::default();
    let ests = rs
        .par_iter()
        .map(|&r| superexp_estimate(3, 1.0, 1.0, 0.0, r, &opts))
        .collect::<oscilla_core::Result<Vec<_>>>()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for e in &ests {
        if let Some(d) = &e.diagnostics {
            log.push(format!("c5 R={}", e.r), d.residual, None);
        } else {
            ok = false;
        }
        let lower = e.model_lower_bound.unwrap_or(f64::NAN);
        let upper = e.upper_bound.unwrap_or(f64::NAN);
        let fd = e.fd_oracle_value.unwrap_or(f64::NAN);
        ok &= lower == 0.25 && (upper / 0.25 - 1.0).abs() <= 0.05 && (fd / 0.25 - 1.0).abs() <= 0.05;
        parts.push(format!("R={}: lower {lower} upper {upper:.4} fd {fd:.4}", e.r));
    }
    Ok((ok, parts.join("; ")))
}

fn c6_sturm(seed: u64, log: &Log) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(u32, f64, f64, f64, f64)> = (0..50)
        .map(|_| {
            let m = rng.gen_range(3..=5);
            let c2 = rng.gen_range(0.05..2.0);
            let c1 = c2 * rng.gen_range(1.0..3.0);
            let p2 = rng.gen_range(1.5..2.5);
            let p1 = p2 - rng.gen_range(0.0..0.5);
            (m, c1, p1, c2, p2)
        })
        .collect();
    let z0 = 1.0;
    let reports = pairs
        .par_iter()
        .map(|&(m, c1, p1, c2, p2)| -> Result<_> {
            let v = euclid(m);
            let r = sturm_compare(
                &v,
                &capped_power(c1, p1)?,
                &capped_power(c2, p2)?,
                z0,
                200.0,
                &SolverOptions::default(),
            )?;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = f64::INFINITY;
    let mut with_zero = 0;
    for (k, r) in reports.iter().enumerate() {
        log.push(
            format!("c6 pair {k} z1"),
            Some(r.residuals.0),
            Some(Some(r.stability.0)),
        );
        log.push(
            format!("c6 pair {k} z2"),
            Some(r.residuals.1),
            Some(Some(r.stability.1)),
        );
        worst = worst.min(r.min_difference);
        with_zero += usize::from(r.first_zero.is_some());
    }
    let ok = worst >= -1e-6 * z0;
    Ok((
        ok,
        format!("50 pairs (seed {seed}), {with_zero} with a zero of z1; min(z2 − z1) = {worst:.3e}"),
    ))
}

fn c7_integrity(log: &Log) -> Result<(bool, String)> {
    let checks = log.0.lock().expect("log poisoned").clone();
    let mut bad = Vec::new();
    let mut worst_res: f64 = 0.0;
    let mut worst_stab: f64 = 0.0;
    for c in &checks {
        match c.residual {
            Some(r) if r <= TOL => worst_res = worst_res.max(r),
            other => bad.push(format!("{} residual {:?}", c.label, other)),
        }
        match c.stability {
            None => {}
            Some(Some(s)) if s <= TOL => worst_stab = worst_stab.max(s),
            Some(other) => bad.push(format!("{} stability {:?}", c.label, other)),
        }
    }
    let v = euclid(3).with_jump(2.0, 0.5)?;
    let j = v.jumps()[0];
    let mid_ok = j.mid == 0.5 * (j.left + j.right);
    let tr = solve_ivp(&v, &capped_power(1.0, 2.0)?, 1.0, 40.0, &SolverOptions::default())?;
    let on_grid = tr.grid().contains(&2.0);
    let (cont, lip) = (continuity_ratio(&tr), flux_lipschitz_ratio(&tr));
    let jump_ok = mid_ok && on_grid && cont <= 1.05 && lip <= 1.05;
    let ok = !checks.is_empty() && bad.is_empty() && jump_ok;
    let mut detail = format!(
        "{} solves, worst residual {worst_res:.2e}, worst stability {worst_stab:.2e}; jump: midpoint stored {mid_ok}, \
         continuity {cont:.3}, flux Lipschitz {lip:.3}",
        checks.len()
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; violations: {}", bad.join(", ")));
    }
    Ok((ok, detail))
}

fn c8_index() -> Result<(bool, String)> {
    let env = GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0)?;
    let v = CoefficientProfile::growth(env);
    let a = hypothesis_potential(&env, 2.0)?;
    let rs: Vec<f64> = (0..=18).map(|k| 50.0 + 25.0 * k as f64).collect();
    let counts = index_lower_bound(&v, &a, &env, 2.0, &rs, &SolverOptions::default())?;
    let threshold = 1.0 / (2.0 * 3f64.ln());
    let worst = counts
        .iter()
        .map(|c| c.count as f64 / c.r.ln())
        .fold(f64::INFINITY, f64::min);
    let ok = counts.len() == rs.len() && worst > threshold;
    Ok((
        ok,
        format!("min count/log r over r ∈ [50, 500] = {worst:.3} against {threshold:.4}"),
    ))
}

fn c9_identity(seed: u64) -> Result<(bool, String)> {
    let profiles = [
        ("euclidean", euclid(3)),
        ("hyperbolic", make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 })?),
        (
            "superexp",
            make_model(ModelKind::SuperExp {
                m: 3,
                a: 1.0,
                alpha: 1.0,
                beta: 0.0,
            })?,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let q = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        ..QuadOptions::default()
    };
    let mut worst_id: f64 = 0.0;
    let mut worst_decade = f64::INFINITY;
    for (_, v) in &profiles {
        for _ in 0..8 {
            let t0 = rng.gen_range(0.05..5.0);
            let t1 = t0 * rng.gen_range(1.1..50.0);
            let sqrt_chi = |s: f64| critical::chi(v, s, f64::INFINITY).map(f64::sqrt).unwrap_or(f64::NAN);
            let lhs = integrate(sqrt_chi, t0, t1, &v.breakpoints(t0, t1), &q)?.value;
            let rhs = 0.5
                * (critical::ln_tail_integral(v, t0, f64::INFINITY)?
                    - critical::ln_tail_integral(v, t1, f64::INFINITY)?);
            worst_id = worst_id.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
        let curve = CriticalCurve::for_profile(v, f64::INFINITY, 1.0, 1e6, 16)?;
        let mut t = 1.0;
        while t < 1e5 {
            worst_decade = worst_decade.min(curve.integral_sqrt(t, 10.0 * t, &QuadOptions::default())?);
            t *= 10.0;
        }
    }
    let ok = worst_id <= 1e-7 && worst_decade > 0.5;
    Ok((
        ok,
        format!(
            "{} profiles: worst identity error {worst_id:.2e}; smallest ∫√χ over a decade of [1, 1e5] = {worst_decade:.3}",
            profiles.len()
        ),
    ))
}

fn timed<F>(id: u8, name: &'static str, limit: Option<f64>, f: F) -> CriterionResult
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let start = Instant::now();
    let res = f();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match res {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e:#}")),
    };
    if let Some(l) = limit {
        if seconds >= l {
            passed = false;
            detail.push_str(&format!("; runtime limit {l} s exceeded"));
        }
    }
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

/// Run all criteria in order. `seed` drives the randomized sweeps.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let log = Log::default();
    let mut out = vec![
        timed(1, "Euler dichotomy", Some(10.0), || c1_euler(&log)),
        timed(2, "hyperbolic dichotomy", Some(10.0), || c2_hyperbolic(&log)),
        timed(3, "constant-coefficient gaps", Some(10.0), || c3_gaps(&log)),
        timed(4, "principal constant", None, c4_constant),
        timed(5, "spectral sandwich", Some(60.0), || c5_spectral(&log)),
        timed(6, "Sturm comparison", Some(60.0), || c6_sturm(seed, &log)),
    ];
    out.push(timed(7, "solver integrity", None, || c7_integrity(&log)));
    out.push(timed(8, "index growth", None, c8_index));
    out.push(timed(9, "critical identity", None, || c9_identity(seed)));
    out
}
