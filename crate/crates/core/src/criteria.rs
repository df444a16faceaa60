//! First-zero localization and oscillation criteria.
//!
//! Every test returns a [`CriterionReport`] carrying the decisive quantities.
//! Limits at infinity are not decidable from a finite horizon; verdicts use
//! the explicit thresholds in [`CriteriaOptions`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::coefficients::{sample_grid, CoefficientProfile, GrowthEnvelope, Side};
use crate::critical::{self, CriticalCurve};
use crate::error::{precondition, Error, Result};
use crate::quadrature::{self, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Whether 1/v is integrable at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    ReciprocalIntegrable,
    ReciprocalNotIntegrable,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::ReciprocalIntegrable => "reciprocal_integrable",
            Branch::ReciprocalNotIntegrable => "reciprocal_not_integrable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Params {
    pub t_start: f64,
    pub t_end: f64,
    pub r_bar: Option<f64>,
    pub c: Option<f64>,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: &'static str,
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    pub error_bar: f64,
    pub params: Params,
    pub branch: Branch,
    pub notes: Vec<String>,
    /// Running quantity (t, value) behind the verdict.
    pub series: Vec<(f64, f64)>,
}

impl CriterionReport {
    fn new(id: &'static str, branch: Branch, params: Params) -> Self {
        Self {
            id,
            verdict: Verdict::Inconclusive,
            lhs: f64::NAN,
            rhs: f64::NAN,
            error_bar: 0.0,
            params,
            branch,
            notes: Vec::new(),
            series: Vec::new(),
        }
    }

    fn decide(&mut self) {
        let d = self.lhs - self.rhs;
        self.verdict = if !d.is_finite() {
            Verdict::Inconclusive
        } else if d > self.error_bar {
            Verdict::Holds
        } else if d < -self.error_bar {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        };
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriteriaOptions {
    pub quad: QuadOptions,
    /// Nodes per decade for running quantities.
    pub per_decade: usize,
    /// Start of the running integrals; defaults to min(1, horizon/100).
    pub t_start: Option<f64>,
    /// A running max above this, still growing over the last decade, is
    /// read as limsup = +∞.
    pub unbounded_threshold: f64,
    /// Ratios must clear 1 by this margin to hold (or fall below 1 − margin to fail).
    pub ratio_margin: f64,
    /// Last-decade over previous-decade increment ratio read as divergence of ∫A v.
    pub divergence_ratio: f64,
    /// Hille–Nehari estimates must exceed 1/2 by this much.
    pub hn_tol: f64,
    /// The inf in item (v) is taken over (r, max(r·window, r + window)].
    pub window: f64,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            quad: QuadOptions::default(),
            per_decade: 64,
            t_start: None,
            unbounded_threshold: 10.0,
            ratio_margin: 0.02,
            divergence_ratio: 0.95,
            hn_tol: 1e-6,
            window: 1e4,
        }
    }
}

fn branch_at(v: &CoefficientProfile, t: f64, upper: f64) -> Result<(Branch, f64)> {
    let j = critical::scaled_tail(v, t, upper)?;
    if j.is_infinite() {
        Ok((Branch::ReciprocalNotIntegrable, j))
    } else {
        Ok((Branch::ReciprocalIntegrable, j))
    }
}

fn sqrt_a(a: &CoefficientProfile, s: f64) -> f64 {
    a.value_unchecked(s, Side::Mid).max(0.0).sqrt()
}

fn breaks(v: &CoefficientProfile, a: &CoefficientProfile, lo: f64, hi: f64) -> Vec<f64> {
    let mut b = v.breakpoints(lo, hi);
    b.extend(a.breakpoints(lo, hi));
    b.sort_by(|x, y| x.total_cmp(y));
    b.dedup();
    b
}

/// ∫_lo^hi √A with its error estimate.
fn int_sqrt_a(a: &CoefficientProfile, lo: f64, hi: f64, q: &QuadOptions) -> Result<quadrature::Estimate> {
    quadrature::integrate(|s| sqrt_a(a, s), lo, hi, &a.breakpoints(lo, hi), q)
}

/// log ∫_0^T A v, computed relative to v(T) to avoid overflow.
fn ln_int_av(v: &CoefficientProfile, a: &CoefficientProfile, t: f64, q: &QuadOptions) -> Result<(f64, f64)> {
    let lt = v.ln_unchecked(t, Side::Mid);
    let br = breaks(v, a, 0.0, t);
    let mut pts = alloc::vec![0.0, (t * 1e-6).min(1e-3)];
    let geo = quadrature::split_points(pts[1], t, &br, q.geometric_ratio);
    pts.extend_from_slice(&geo[1..]);
    let est = quadrature::integrate_pieces(
        |s| a.value_unchecked(s, Side::Mid) * (v.ln_unchecked(s, Side::Mid) - lt).exp(),
        &pts,
        q,
    )?;
    Ok((est.value.ln() + lt, est.error / est.value))
}

fn geometric(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = (((hi / lo).log10()) * per_decade as f64).ceil().max(1.0) as usize;
    let q = (hi / lo).powf(1.0 / n as f64);
    let mut g: Vec<f64> = (0..n).map(|k| lo * q.powi(k as i32)).collect();
    g.push(hi);
    g
}

/// First-zero test on (T, t): holds when ∫_T^t(√A − √χ) exceeds
/// −½(log∫_0^T A v + log∫_T^∞ 1/v); then the first zero lies in (0, R̄].
pub fn first_zero_test(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    t_start: f64,
    t_end: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    if !(t_start > 0.0 && t_end > t_start) {
        return Err(precondition(format!("need 0 < T < t, got T = {t_start}, t = {t_end}")));
    }
    if !sample_grid(t_start, 200)
        .iter()
        .any(|&s| a.value_unchecked(s, Side::Mid) > 0.0)
    {
        return Err(precondition("A vanishes identically on [0, T]"));
    }
    let q = &opts.quad;
    let (branch, j_t) = branch_at(v, t_start, v.domain_end())?;
    let params = Params {
        t_start,
        t_end,
        horizon: t_end,
        ..Params::default()
    };
    let mut rep = CriterionReport::new("first_zero", branch, params);
    let ia = int_sqrt_a(a, t_start, t_end, q)?;
    let (ln_w, w_rel) = ln_int_av(v, a, t_start, q)?;
    if branch == Branch::ReciprocalNotIntegrable {
        rep.verdict = Verdict::Holds;
        rep.notes.push(String::from(
            "1/v is not integrable at infinity: holds by the branch rule",
        ));
        rep.lhs = f64::INFINITY;
        rep.rhs = f64::NEG_INFINITY;
    } else {
        let ln_it = j_t.ln() - v.ln_unchecked(t_start, Side::Mid);
        let ln_i_end = critical::ln_tail_integral(v, t_end, v.domain_end())?;
        // ∫_T^t √χ = ½ log I(T) − ½ log I(t).
        let int_chi = 0.5 * (ln_it - ln_i_end);
        rep.lhs = ia.value - int_chi;
        rep.rhs = -0.5 * (ln_w + ln_it);
        rep.error_bar = ia.error + 0.5 * w_rel + 4.0 * q.rel_tol * (1.0 + rep.lhs.abs() + rep.rhs.abs());
        rep.decide();
    }
    if rep.verdict == Verdict::Holds {
        let ln_target = -2.0 * ia.value - ln_w;
        match solve_r_bar(v, t_end, ln_target) {
            Ok(r) => rep.params.r_bar = Some(r),
            Err(e) => rep.notes.push(format!("R̄ unavailable: {e}")),
        }
    }
    Ok(rep)
}

/// Solve ∫_t^R ds/v = e^{ln_target} for R by monotone bisection.
pub fn solve_r_bar(v: &CoefficientProfile, t: f64, ln_target: f64) -> Result<f64> {
    let lt = v.ln_unchecked(t, Side::Mid);
    let ln_f = |r: f64| -> Result<f64> { Ok(critical::scaled_tail(v, t, r)?.ln() - lt) };
    let end = v.domain_end();
    let mut lo = t;
    let mut width = t.max(1.0) * 1e-3;
    let mut hi = t + width;
    let mut f_prev = f64::NEG_INFINITY;
    loop {
        if hi >= end {
            return Err(precondition("target exceeds the reciprocal tail integral"));
        }
        let f = ln_f(hi)?;
        if !(f > f_prev) {
            return Err(Error::SolverAccuracy {
                detail: String::from("∫_t^R ds/v not increasing in R"),
                measured: f,
                tolerance: f_prev,
            });
        }
        f_prev = f;
        if f >= ln_target {
            break;
        }
        lo = hi;
        width *= 2.0;
        hi = t + width;
        if !hi.is_finite() {
            return Err(precondition("R̄ search overflowed"));
        }
    }
    let (mut f_lo, mut f_hi) = (if lo > t { ln_f(lo)? } else { f64::NEG_INFINITY }, f_prev);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-13 * hi {
            break;
        }
        let f = ln_f(mid)?;
        if !(f >= f_lo && f <= f_hi) {
            return Err(Error::SolverAccuracy {
                detail: String::from("monotonicity lost during R̄ bisection"),
                measured: f,
                tolerance: f_hi,
            });
        }
        if f < ln_target {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan T over a geometric grid in (0, t) and return the report with the
/// largest margin lhs − rhs.
pub fn first_zero_scan(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    t_end: f64,
    n: usize,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    let lo = (t_end * 1e-4).max(1e-6);
    let hi = t_end * 0.5;
    let mut best: Option<CriterionReport> = None;
    for k in 0..n.max(1) {
        let t = lo * (hi / lo).powf(k as f64 / (n.max(2) - 1) as f64);
        let r = match first_zero_test(v, a, t, t_end, opts) {
            Ok(r) => r,
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some(b) => (r.lhs - r.rhs) > (b.lhs - b.rhs),
        };
        if better {
            best = Some(r);
        }
    }
    best.ok_or_else(|| precondition("no admissible T in the scan"))
}

/// Running quantities on a geometric grid over [T, horizon].
struct Running {
    grid: Vec<f64>,
    int_sqrt_a: Vec<f64>,
    int_err: f64,
    ln_tail: Vec<f64>,
    sqrt_chi: Vec<f64>,
}

fn running(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    t0: f64,
    horizon: f64,
    opts: &CriteriaOptions,
) -> Result<Running> {
    let curve = CriticalCurve::for_profile(v, f64::INFINITY, t0, horizon, opts.per_decade)?;
    let grid = geometric(t0, horizon, opts.per_decade);
    let mut acc = 0.0;
    let mut err = 0.0;
    let mut ints = Vec::with_capacity(grid.len());
    let mut tails = Vec::with_capacity(grid.len());
    let mut chis = Vec::with_capacity(grid.len());
    for (k, &t) in grid.iter().enumerate() {
        if k > 0 {
            let e = int_sqrt_a(a, grid[k - 1], t, &opts.quad)?;
            acc += e.value;
            err += e.error;
        }
        ints.push(acc);
        tails.push(curve.ln_tail(t)?);
        chis.push(curve.sqrt_value(t)?);
    }
    Ok(Running {
        grid,
        int_sqrt_a: ints,
        int_err: err,
        ln_tail: tails,
        sqrt_chi: chis,
    })
}

fn default_start(horizon: f64, opts: &CriteriaOptions) -> f64 {
    opts.t_start.unwrap_or((horizon / 100.0).min(1.0))
}

/// Indices of the last decade of the grid.
fn last_decade(grid: &[f64]) -> usize {
    let end = grid[grid.len() - 1];
    grid.partition_point(|&t| t < end / 10.0)
}

/// Oscillation test: branch 1 needs ∫ A v = ∞; branch 2 needs an unbounded
/// running ∫_T^t(√A − √χ).
pub fn oscillation_test(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    horizon: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    let t0 = default_start(horizon, opts);
    let (branch, _) = branch_at(v, t0, v.domain_end())?;
    let params = Params {
        t_start: t0,
        t_end: horizon,
        horizon,
        ..Params::default()
    };
    let mut rep = CriterionReport::new("oscillation", branch, params);
    match branch {
        Branch::ReciprocalNotIntegrable => {
            // Cumulative ∫ A v over the last two decades.
            let h = horizon;
            let w = |lo: f64, hi: f64| -> Result<f64> {
                Ok(quadrature::integrate(
                    |s| a.value_unchecked(s, Side::Mid) * v.value_unchecked(s, Side::Mid),
                    lo,
                    hi,
                    &breaks(v, a, lo, hi),
                    &opts.quad,
                )?
                .value)
            };
            let d2 = w(h / 10.0, h)?;
            let d1 = w(h / 100.0, h / 10.0)?;
            rep.lhs = d2;
            rep.rhs = opts.divergence_ratio * d1;
            rep.series = alloc::vec![(h / 10.0, d1), (h, d2)];
            rep.verdict = if d2 > 0.0 && d2 >= opts.divergence_ratio * d1 {
                rep.notes
                    .push(String::from("∫ A v read as divergent from its last-decade growth"));
                Verdict::Holds
            } else {
                rep.notes
                    .push(String::from("∫ A v appears convergent; branch undecided"));
                Verdict::Inconclusive
            };
        }
        Branch::ReciprocalIntegrable => {
            let r = running(v, a, t0, horizon, opts)?;
            let ln_i0 = r.ln_tail[0];
            let mut best = f64::NEG_INFINITY;
            let mut best_at = 0;
            for k in 0..r.grid.len() {
                let g = r.int_sqrt_a[k] - 0.5 * (ln_i0 - r.ln_tail[k]);
                rep.series.push((r.grid[k], g));
                if g > best {
                    best = g;
                    best_at = k;
                }
            }
            let ld = last_decade(&r.grid);
            let g_end = rep.series[rep.series.len() - 1].1;
            let g_dec = rep.series[ld].1;
            rep.lhs = best;
            rep.rhs = opts.unbounded_threshold;
            rep.error_bar = r.int_err;
            let growing = best_at >= ld && g_end > g_dec + rep.error_bar;
            rep.verdict = if best > opts.unbounded_threshold && growing {
                Verdict::Holds
            } else {
                Verdict::Inconclusive
            };
            rep.notes.push(format!(
                "running max {best:.6} (threshold {}), last-decade change {:.3e}",
                opts.unbounded_threshold,
                g_end - g_dec
            ));
        }
    }
    Ok(rep)
}

fn chi_undefined(id: &'static str, params: Params) -> CriterionReport {
    let mut r = CriterionReport::new(id, Branch::ReciprocalNotIntegrable, params);
    r.notes.push(String::from(
        "χ is undefined because 1/v is not integrable; use the non-integrable branch of the oscillation test",
    ));
    r
}

/// Items (i)–(v) of the sufficient conditions for oscillation.
pub fn sufficient_conditions(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    f: Option<&GrowthEnvelope>,
    horizon: f64,
    opts: &CriteriaOptions,
) -> Result<Vec<CriterionReport>> {
    let t0 = default_start(horizon, opts);
    let (branch, _) = branch_at(v, t0, v.domain_end())?;
    let params = Params {
        t_start: t0,
        t_end: horizon,
        horizon,
        ..Params::default()
    };
    let mut out = Vec::with_capacity(5);
    if branch == Branch::ReciprocalNotIntegrable {
        for id in ["item_i", "item_ii", "item_iii", "item_iv"] {
            out.push(chi_undefined(id, params));
        }
    } else {
        let r = running(v, a, t0, horizon, opts)?;
        let ld = last_decade(&r.grid);
        let m = opts.ratio_margin;
        let ln_i0 = r.ln_tail[0];

        // (i) A ≥ χ pointwise and √A − √χ not integrable.
        let mut rep = CriterionReport::new("item_i", branch, params);
        let mut min_gap = f64::INFINITY;
        for (k, &t) in r.grid.iter().enumerate() {
            let d = sqrt_a(a, t) - r.sqrt_chi[k];
            min_gap = min_gap.min(d / r.sqrt_chi[k]);
            let g = r.int_sqrt_a[k] - 0.5 * (ln_i0 - r.ln_tail[k]);
            rep.series.push((t, g));
        }
        let g_end = rep.series[rep.series.len() - 1].1;
        let g_dec = rep.series[ld].1;
        rep.lhs = g_end;
        rep.rhs = opts.unbounded_threshold;
        rep.error_bar = r.int_err;
        rep.verdict = if min_gap < -m {
            rep.notes
                .push(format!("A < χ somewhere on the grid (relative gap {min_gap:.3e})"));
            Verdict::Fails
        } else if g_end > opts.unbounded_threshold && g_end > g_dec + r.int_err {
            Verdict::Holds
        } else {
            Verdict::Inconclusive
        };
        out.push(rep);

        // (ii) limsup ∫√A / ∫√χ > 1.
        let mut rep = CriterionReport::new("item_ii", branch, params);
        let mut best = f64::NEG_INFINITY;
        for k in 1..r.grid.len() {
            let ic = 0.5 * (ln_i0 - r.ln_tail[k]);
            let q = r.int_sqrt_a[k] / ic;
            rep.series.push((r.grid[k], q));
            if k >= ld {
                best = best.max(q);
            }
        }
        rep.lhs = best;
        rep.rhs = 1.0;
        rep.error_bar = m;
        rep.decide();
        out.push(rep);

        // (iii) liminf √A/√χ > 1.
        let mut rep = CriterionReport::new("item_iii", branch, params);
        let mut worst = f64::INFINITY;
        for k in 0..r.grid.len() {
            let q = sqrt_a(a, r.grid[k]) / r.sqrt_chi[k];
            rep.series.push((r.grid[k], q));
            if k >= ld {
                worst = worst.min(q);
            }
        }
        rep.lhs = worst;
        rep.rhs = 1.0;
        rep.error_bar = m;
        rep.decide();
        out.push(rep);

        // (iv) limsup ∫_T^t √A / (−½ log∫_t^∞ ds/v) > 1.
        let mut rep = CriterionReport::new("item_iv", branch, params);
        let mut best = f64::NEG_INFINITY;
        for k in 1..r.grid.len() {
            let den = -0.5 * r.ln_tail[k];
            if den > 0.0 {
                let q = r.int_sqrt_a[k] / den;
                rep.series.push((r.grid[k], q));
                if k >= ld {
                    best = best.max(q);
                }
            }
        }
        rep.lhs = best;
        rep.rhs = 1.0;
        rep.error_bar = m;
        rep.decide();
        if !best.is_finite() {
            rep.notes
                .push(String::from("log tail never negative on the last decade"));
        }
        out.push(rep);
    }
    out.push(item_v(v, a, f, t0, horizon, branch, opts)?);
    Ok(out)
}

/// Right end of the window used for the inf over t > r.
pub fn window_end(r: f64, window: f64) -> f64 {
    (r * window).max(r + window)
}

/// inf over t ∈ (r, window_end(r, window)] of g(t)/(t − r) with
/// g(t) = −½ log∫_t^∞ ds/f, read from a cached χ_f curve covering the window.
pub fn envelope_inf(curve: &CriticalCurve, r: f64, window: f64) -> Result<f64> {
    let g = |t: f64| -> Result<f64> { Ok(-0.5 * curve.ln_tail(t)?) };
    let end = window_end(r, window);
    let d0 = 1e-3 * r.max(1e-3);
    let n = 400;
    let q = ((end - r) / d0).powf(1.0 / n as f64);
    let mut best = f64::INFINITY;
    let mut best_k = 0;
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let d = d0 * q.powi(k as i32);
        let x = g(r + d)? / d;
        vals.push(d);
        if x < best {
            best = x;
            best_k = k;
        }
    }
    // Golden-section refinement in log d around the best grid point.
    let lo_k = best_k.saturating_sub(1);
    let hi_k = (best_k + 1).min(n);
    let (mut a, mut b) = (vals[lo_k].ln(), vals[hi_k].ln());
    let phi = 0.618_033_988_749_895;
    let eval = |ld: f64| -> Result<f64> {
        let d = ld.exp();
        Ok(g(r + d)? / d)
    };
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d)?;
        }
    }
    Ok(best.min(fc).min(fd))
}

fn item_v(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    f: Option<&GrowthEnvelope>,
    t0: f64,
    horizon: f64,
    branch: Branch,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    let params = Params {
        t_start: t0,
        t_end: horizon,
        horizon,
        ..Params::default()
    };
    let mut rep = CriterionReport::new("item_v", branch, params);
    let Some(env) = f else {
        rep.notes.push(String::from("no growth envelope supplied"));
        return Ok(rep);
    };
    let vol = quadrature::integrate_tail(
        |s| v.value_unchecked(s, Side::Mid),
        t0,
        1.0,
        &v.breakpoints(t0, horizon),
        &opts.quad,
    )?;
    if vol.value.is_finite() {
        rep.notes.push(String::from("requires v not integrable at infinity"));
        return Ok(rep);
    }
    let samples = sample_grid(horizon, 200);
    let mut prev = 0.0;
    for &t in &samples {
        let x = a.value_unchecked(t, Side::Mid);
        if !(x > 0.0) || x < prev * (1.0 - 1e-12) {
            rep.notes
                .push(format!("A must be positive and nondecreasing (fails at t = {t})"));
            return Ok(rep);
        }
        prev = x;
    }
    let lo = t0.max(env.lower_limit() + 1e-9).max(horizon / 1e3);
    let grid = geometric(lo, horizon, opts.per_decade.min(16));
    let ld = last_decade(&grid);
    let mut hits = 0;
    let mut margin = f64::NEG_INFINITY;
    let curve = CriticalCurve::for_envelope(env, false, lo, window_end(horizon, opts.window), 16)?;
    for (k, &tn) in grid.iter().enumerate() {
        let lhs = sqrt_a(a, tn);
        let inf = envelope_inf(&curve, tn, opts.window)?;
        rep.series.push((tn, lhs - inf));
        if k >= ld {
            if lhs > inf * (1.0 + opts.ratio_margin) {
                hits += 1;
            }
            if lhs - inf > margin {
                margin = lhs - inf;
                rep.lhs = lhs;
                rep.rhs = inf;
            }
        }
    }
    rep.verdict = if hits > 0 {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    rep.notes.push(format!(
        "t_n searched on a geometric grid over the last decade; inf over (t_n, max(t_n·{w}, t_n + {w})]; {hits} hits",
        w = opts.window
    ));
    Ok(rep)
}

/// Hille–Nehari comparison: liminf √A · v · ∫_t^∞ ds/v against 1/2.
pub fn hille_nehari_gap(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    horizon: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    let t0 = default_start(horizon, opts);
    let (branch, _) = branch_at(v, t0, v.domain_end())?;
    let params = Params {
        t_start: t0,
        t_end: horizon,
        horizon,
        ..Params::default()
    };
    let mut rep = CriterionReport::new("hille_nehari", branch, params);
    if branch == Branch::ReciprocalNotIntegrable {
        rep.notes.push(String::from("requires 1/v integrable at infinity"));
        return Ok(rep);
    }
    let curve = CriticalCurve::for_profile(v, f64::INFINITY, t0, horizon, opts.per_decade)?;
    let grid = geometric(t0, horizon, opts.per_decade);
    let ld = last_decade(&grid);
    let mut est = f64::INFINITY;
    for (k, &t) in grid.iter().enumerate() {
        let q = sqrt_a(a, t) * curve.scaled_tail(t)?;
        rep.series.push((t, q));
        if k >= ld {
            est = est.min(q);
        }
    }
    rep.lhs = est;
    rep.rhs = 0.5;
    rep.error_bar = opts.hn_tol;
    rep.verdict = if est > 0.5 + opts.hn_tol {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    if (est - 0.5).abs() <= 1e-3 {
        rep.notes.push(String::from(
            "liminf is at 1/2: the comparison is silent, yet the stronger integral condition can still hold",
        ));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{make_model, ModelKind};

    fn euclid(m: u32) -> CoefficientProfile {
        make_model(ModelKind::Euclidean { m }).unwrap()
    }

    fn capped(h: f64) -> CoefficientProfile {
        CoefficientProfile::power(h * h, -2.0)
            .unwrap()
            .clamped_below(1.0)
            .unwrap()
    }

    #[test]
    fn first_zero_euler_example() {
        let r = first_zero_test(&euclid(3), &capped(1.0), 1.0, 40.0, &CriteriaOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.lhs - 0.5 * 40f64.ln()).abs() < 1e-8);
        assert!((r.rhs - 0.5 * 3f64.ln()).abs() < 1e-8);
        let rb = r.params.r_bar.unwrap();
        assert!((rb - 1.0 / 0.023125).abs() < 1e-7 * rb);
    }

    #[test]
    fn first_zero_branch_rule() {
        let a = CoefficientProfile::constant(0.01).unwrap();
        let r = first_zero_test(&euclid(2), &a, 1.0, 2.0, &CriteriaOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.branch, Branch::ReciprocalNotIntegrable);
        let zero = CoefficientProfile::constant(0.0).unwrap();
        assert!(first_zero_test(&euclid(3), &zero, 1.0, 2.0, &CriteriaOptions::default()).is_err());
    }

    #[test]
    fn oscillation_examples() {
        let o = CriteriaOptions::default();
        let e = CoefficientProfile::growth(GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap());
        let one = CoefficientProfile::constant(1.0).unwrap();
        assert_eq!(oscillation_test(&e, &one, 100.0, &o).unwrap().verdict, Verdict::Holds);
        let crit = oscillation_test(&euclid(3), &capped(0.5), 1e6, &o).unwrap();
        assert_eq!(crit.verdict, Verdict::Inconclusive);
        let inv = CoefficientProfile::power(1.0, -1.0).unwrap();
        let r = oscillation_test(&euclid(2), &inv, 1e4, &o).unwrap();
        assert_eq!(r.branch, Branch::ReciprocalNotIntegrable);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn hille_nehari_examples() {
        let o = CriteriaOptions::default();
        let r = hille_nehari_gap(&euclid(3), &capped(1.0), 1e4, &o).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9 && r.verdict == Verdict::Holds);
        let b = hille_nehari_gap(&euclid(3), &capped(0.5), 1e4, &o).unwrap();
        assert!((b.lhs - 0.5).abs() < 1e-9 && b.verdict == Verdict::Fails);
        let e = CoefficientProfile::growth(GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap());
        let one = CoefficientProfile::constant(1.0).unwrap();
        let r = hille_nehari_gap(&e, &one, 100.0, &o).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9 && r.verdict == Verdict::Holds);
    }

    #[test]
    fn sufficient_euler_and_equality() {
        let o = CriteriaOptions::default();
        let reps = sufficient_conditions(&euclid(3), &capped(1.0), None, 1e4, &o).unwrap();
        let iii = reps.iter().find(|r| r.id == "item_iii").unwrap();
        assert_eq!(iii.verdict, Verdict::Holds);
        assert!((iii.lhs - 2.0).abs() < 1e-9);
        let eq = sufficient_conditions(&euclid(3), &capped(0.5), None, 1e4, &o).unwrap();
        assert!(eq.iter().all(|r| r.verdict != Verdict::Holds), "{eq:?}");
    }

    #[test]
    fn hyperbolic_item_iii_ratio() {
        let v = make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 }).unwrap();
        let a = CoefficientProfile::coth(0.36, 1.0).unwrap().clamped_below(1.0).unwrap();
        let reps = sufficient_conditions(&v, &a, None, 200.0, &CriteriaOptions::default()).unwrap();
        let iii = reps.iter().find(|r| r.id == "item_iii").unwrap();
        assert_eq!(iii.verdict, Verdict::Holds);
        assert!((iii.lhs - 1.2).abs() < 0.024, "{}", iii.lhs);
    }

    #[test]
    fn subcritical_euler_never_localizes() {
        let o = CriteriaOptions::default();
        for t in [2.0, 10.0, 100.0, 1e3] {
            let r = first_zero_scan(&euclid(3), &capped(0.4), t, 24, &o).unwrap();
            assert_eq!(r.verdict, Verdict::Fails, "t = {t}");
        }
    }

    #[test]
    fn localization_matches_solver() {
        use crate::volterra::{solve_ivp, SolverOptions};
        let r = first_zero_test(&euclid(3), &capped(1.0), 1.0, 40.0, &CriteriaOptions::default()).unwrap();
        let rb = r.params.r_bar.unwrap();
        let tr = solve_ivp(&euclid(3), &capped(1.0), 1.0, rb * 1.001, &SolverOptions::default()).unwrap();
        assert!(tr.zeros[0].location <= rb);
    }

    #[test]
    fn item_v_exponential() {
        let env = GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let e = CoefficientProfile::growth(env);
        let one = CoefficientProfile::constant(1.0).unwrap();
        let reps = sufficient_conditions(&e, &one, Some(&env), 100.0, &CriteriaOptions::default()).unwrap();
        let v = reps.iter().find(|r| r.id == "item_v").unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        assert!((v.rhs - 0.5).abs() < 1e-3, "{}", v.rhs);
        let weak = CoefficientProfile::constant(0.2).unwrap();
        let reps = sufficient_conditions(&e, &weak, Some(&env), 100.0, &CriteriaOptions::default()).unwrap();
        assert_ne!(reps[4].verdict, Verdict::Holds);
    }
}
