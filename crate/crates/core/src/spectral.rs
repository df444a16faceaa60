//! Spectral-radius bounds and index counts on model manifolds, with a
//! finite-difference eigenvalue oracle as an independent check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::coefficients::{make_model, CoefficientProfile, GrowthEnvelope, ModelKind, Side};
use crate::criteria::{envelope_inf, window_end};
use crate::critical::{self, CriticalCurve};
use crate::error::{parameter, precondition, Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::volterra::{solve_from, solve_ivp, Diagnostics, SolutionTrack, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralParams {
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub m: Option<u32>,
    pub b_tilde: Option<f64>,
    pub c_star: Option<f64>,
    /// Nodal annulus used by the Rayleigh bound.
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralEstimate {
    pub r: f64,
    pub upper_bound: Option<f64>,
    /// A_ε(T2), the ceiling the Rayleigh quotient must respect.
    pub potential_at_t2: Option<f64>,
    pub model_lower_bound: Option<f64>,
    pub asymptotic_constant: Option<f64>,
    pub fd_oracle_value: Option<f64>,
    pub params: SpectralParams,
    pub notes: Vec<String>,
    /// Diagnostics of the solve behind the Rayleigh quotient.
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub solver: SolverOptions,
    /// ε added to the squared inf in A_ε.
    pub eps: f64,
    /// Window factor for the inf over t > r.
    pub window: f64,
    /// Table knots for A_ε on [R, horizon].
    pub knots: usize,
    /// Horizons grow by doubling up to R·cap_factor.
    pub cap_factor: f64,
    /// FD grid size and window length [R, R + fd_length].
    pub fd_n: usize,
    pub fd_length: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            eps: 2e-3,
            window: 1e4,
            knots: 200,
            cap_factor: 1e3,
            fd_n: 2048,
            fd_length: 40.0,
        }
    }
}

/// Sampled A_ε(t) = (inf_{s>t} g(s)/(s − t))² + ε on [lo, hi], with
/// g(s) = −½ log∫_s^∞ dσ/f. A running max keeps the table nondecreasing.
pub fn lemma_potential(
    env: &GrowthEnvelope,
    eps: f64,
    lo: f64,
    hi: f64,
    knots: usize,
    window: f64,
) -> Result<CoefficientProfile> {
    if !(eps > 0.0) {
        return Err(parameter(format!("ε must be positive, got {eps}")));
    }
    if !(lo > env.lower_limit() && hi > lo) {
        return Err(parameter(format!("A_ε range [{lo}, {hi}] is invalid for the envelope")));
    }
    let curve = CriticalCurve::for_envelope(env, false, lo, window_end(hi, window), 16)?;
    let n = knots.max(2);
    let mut samples = Vec::with_capacity(n + 1);
    let mut run = 0.0f64;
    for k in 0..=n {
        let t = lo + (hi - lo) * k as f64 / n as f64;
        let i = envelope_inf(&curve, t, window)?;
        run = run.max(i * i + eps);
        samples.push((t, run));
    }
    CoefficientProfile::table(&samples, &[])
}

/// Rayleigh quotient ∫(z')²v / ∫z²v over [t1, t2] on a solved track.
pub fn rayleigh_quotient(track: &SolutionTrack, t1: f64, t2: f64) -> Result<f64> {
    let v = track.volume();
    let mut pts: Vec<f64> = Vec::new();
    pts.push(t1);
    pts.extend(track.grid().into_iter().filter(|&t| t > t1 && t < t2));
    pts.push(t2);
    let l_ref = pts
        .iter()
        .map(|&t| v.ln_unchecked(t, Side::Mid))
        .fold(f64::NEG_INFINITY, f64::max);
    let q = QuadOptions {
        max_intervals: pts.len() + 4000,
        ..QuadOptions::default()
    };
    let w = |t: f64| (v.ln_unchecked(t, Side::Mid) - l_ref).exp();
    let num = quadrature::integrate_pieces(
        |t| {
            let (_, d) = track.evaluate(t);
            d * d * w(t)
        },
        &pts,
        &q,
    )?;
    let den = quadrature::integrate_pieces(
        |t| {
            let (z, _) = track.evaluate(t);
            z * z * w(t)
        },
        &pts,
        &q,
    )?;
    Ok(num.value / den.value)
}

fn volume_infinite(v: &CoefficientProfile, r: f64) -> Result<bool> {
    let e = quadrature::integrate_tail(
        |s| v.value_unchecked(s, Side::Mid),
        r,
        1.0,
        &[],
        &QuadOptions::default(),
    )?;
    Ok(e.value.is_infinite())
}

/// Rayleigh upper bound on λ₁(M∖B_R) from the first nodal annulus of the
/// solution started at R with z = 1, (v z')(R) = 0.
pub fn rayleigh_upper(
    v: &CoefficientProfile,
    a_eps: &CoefficientProfile,
    r: f64,
    opts: &SpectralOptions,
) -> Result<SpectralEstimate> {
    let mut est = SpectralEstimate {
        r,
        ..SpectralEstimate::default()
    };
    if critical::scaled_tail(v, r, v.domain_end())?.is_infinite() {
        if volume_infinite(v, r)? {
            est.upper_bound = Some(0.0);
            est.notes.push(String::from(
                "1/v not integrable with infinite volume: the bound is 0 as ε → 0",
            ));
            return Ok(est);
        }
        return Err(precondition("1/v and v both integrable: no Rayleigh route"));
    }
    let a_r = a_eps.eval(r)?;
    if !(a_r > 0.0) {
        return Err(precondition("A_ε must be positive"));
    }
    let end = a_eps.domain_end().min(v.domain_end());
    let mut h = (r + 16.0 * core::f64::consts::PI / a_r.sqrt()).min(end);
    let cap = (r * opts.cap_factor).min(end);
    let track = loop {
        let tr = solve_from(v, a_eps, r, 1.0, 0.0, h, &opts.solver)?;
        if tr.zeros.len() >= 2 {
            break tr;
        }
        if h >= cap {
            return Err(Error::Horizon {
                horizon: h,
                found: tr.zeros.len(),
                needed: 2,
            });
        }
        h = (r + 2.0 * (h - r)).min(cap);
    };
    let (t1, t2) = (track.zeros[0].location, track.zeros[1].location);
    let q = rayleigh_quotient(&track, t1, t2)?;
    let a2 = a_eps.eval(t2)?;
    est.upper_bound = Some(q);
    est.potential_at_t2 = Some(a2);
    est.diagnostics = Some(track.diagnostics.clone());
    est.params.t1 = Some(t1);
    est.params.t2 = Some(t2);
    est.notes.push(String::from(
        "bound taken at the first nodal annulus past R; it depends on R",
    ));
    Ok(est)
}

/// Rayleigh bound with A_ε built from the envelope; the table is rebuilt
/// on a doubled range until the first nodal annulus fits.
pub fn rayleigh_upper_envelope(
    v: &CoefficientProfile,
    env: &GrowthEnvelope,
    r: f64,
    opts: &SpectralOptions,
) -> Result<SpectralEstimate> {
    let mut span = 16.0 * core::f64::consts::PI / opts.eps.sqrt();
    let cap = r * opts.cap_factor;
    loop {
        let hi = (r + span).min(cap);
        let a = lemma_potential(env, opts.eps, r, hi, opts.knots, opts.window)?;
        match rayleigh_upper(v, &a, r, opts) {
            Err(Error::Horizon { .. }) if hi < cap => span *= 2.0,
            Ok(mut e) => {
                e.params.eps = Some(opts.eps);
                return Ok(e);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Which regime of the volume exponent α applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaBranch {
    /// 0 < α < 1: the spectral radius vanishes.
    Subexponential,
    Exponential,
    Superexponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalConstant {
    pub value: f64,
    /// Optimal c; None at α = 1 where it tends to 1⁺.
    pub c_star: Option<f64>,
    pub branch: AlphaBranch,
}

/// Root of α(c+1)(c−1) = 4(α−1)c in (1, ∞) by Newton safeguarded with bisection.
fn optimal_c(alpha: f64) -> f64 {
    let k = 4.0 * (alpha - 1.0) / alpha;
    let phi = |c: f64| c * c - k * c - 1.0;
    let (mut lo, mut hi) = (1.0, k + 1.0);
    let mut c = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = phi(c);
        if f < 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        let mut next = c - f / (2.0 * c - k);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - c).abs() <= 1e-16 * c {
            return next;
        }
        c = next;
    }
    c
}

/// (a²α²/4)·min_{c>1} c²((c+1)/(c−1))^{4(α−1)/α}.
pub fn principale_constant(a: f64, alpha: f64, beta: f64) -> Result<PrincipalConstant> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(parameter(format!("a must be positive, got {a}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(parameter(format!("α must be positive, got {alpha}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(parameter(format!("β must be nonnegative, got {beta}")));
    }
    if alpha < 1.0 {
        return Ok(PrincipalConstant {
            value: 0.0,
            c_star: None,
            branch: AlphaBranch::Subexponential,
        });
    }
    if alpha == 1.0 {
        return Ok(PrincipalConstant {
            value: a * a / 4.0,
            c_star: None,
            branch: AlphaBranch::Exponential,
        });
    }
    let c = optimal_c(alpha);
    let k = 4.0 * (alpha - 1.0) / alpha;
    let value = a * a * alpha * alpha / 4.0 * c * c * ((c + 1.0) / (c - 1.0)).powf(k);
    Ok(PrincipalConstant {
        value,
        c_star: Some(c),
        branch: AlphaBranch::Superexponential,
    })
}

/// λ_b(r) = α²b(a−b)r^{2(α−1)} + α(α−1)b r^{α−2}.
pub fn lambda_b(a: f64, alpha: f64, b: f64, r: f64) -> f64 {
    alpha * alpha * b * (a - b) * r.powf(2.0 * (alpha - 1.0)) + alpha * (alpha - 1.0) * b * r.powf(alpha - 2.0)
}

/// Lower bound α²(a²/4 − (α−1)²/(4α²)·R^{−2α})R^{2(α−1)} for the model with
/// v = exp{a r^α} past r = 2.
pub fn model_lower_bound(a: f64, alpha: f64, r: f64, m: u32) -> Result<SpectralEstimate> {
    if !(alpha >= 1.0) {
        return Err(parameter(format!("the model bound needs α ≥ 1, got {alpha}")));
    }
    if !(a > 0.0 && r >= 2.0) {
        return Err(parameter(format!("need a > 0 and R ≥ 2, got a = {a}, R = {r}")));
    }
    let s = (alpha - 1.0) / (2.0 * alpha) / r.powf(alpha);
    if !(s < a / 2.0) {
        return Err(parameter(format!("R = {r} too small: b̃ leaves (0, a)")));
    }
    let b_tilde = a / 2.0 + s;
    let lower = alpha * alpha * (a * a / 4.0 - s * s) * r.powf(2.0 * (alpha - 1.0));
    Ok(SpectralEstimate {
        r,
        model_lower_bound: Some(lower),
        params: SpectralParams {
            a: Some(a),
            alpha: Some(alpha),
            m: Some(m),
            b_tilde: Some(b_tilde),
            ..SpectralParams::default()
        },
        ..SpectralEstimate::default()
    })
}

/// Potential realizing the growth hypothesis: √A = c(aα/2)t^{α−1}log^β t,
/// held constant on (0, 1].
pub fn hypothesis_potential(env: &GrowthEnvelope, c: f64) -> Result<CoefficientProfile> {
    if !(c > 1.0) {
        return Err(parameter(format!("c must exceed 1, got {c}")));
    }
    let k = c * env.rate * env.exponent / 2.0;
    CoefficientProfile::power_log(k * k, 2.0 * (env.exponent - 1.0), 2.0 * env.log_exponent)?.clamped_below(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexCount {
    pub r: f64,
    /// Disjoint nodal domains inside B_r: the ball up to the first zero and
    /// the annuli between consecutive zeros.
    pub count: usize,
    pub rate: f64,
    pub predicted_rate: f64,
}

/// Nodal-domain counts at each radius in `rs` from one solve.
pub fn index_lower_bound(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    env: &GrowthEnvelope,
    c: f64,
    rs: &[f64],
    solver: &SolverOptions,
) -> Result<Vec<IndexCount>> {
    let predicted = env.exponent / (2.0 * ((c + 1.0) / (c - 1.0)).ln());
    let rmax = rs.iter().copied().fold(0.0, f64::max);
    if !(rmax > 1.0) {
        return Err(parameter("radii must exceed 1"));
    }
    let track = solve_ivp(v, a, 1.0, rmax, solver)?;
    Ok(rs
        .iter()
        .map(|&r| {
            let count = track.zeros.iter().filter(|z| z.location <= r).count();
            IndexCount {
                r,
                count,
                rate: count as f64 / r.ln(),
                predicted_rate: predicted,
            }
        })
        .collect())
}

/// Smallest eigenvalue of −(v z')' = λ v z with Dirichlet ends, second-order
/// finite differences on n intervals.
pub fn fd_eigenvalue(v: &CoefficientProfile, t1: f64, t2: f64, n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::Oracle(format!("grid size {n} below 16")));
    }
    if !(t2 > t1 && t1 >= 0.0) {
        return Err(Error::Oracle(format!("invalid interval [{t1}, {t2}]")));
    }
    let h = (t2 - t1) / n as f64;
    let lv = |t: f64| v.ln_unchecked(t, Side::Mid);
    let nodes: Vec<f64> = (1..n).map(|i| lv(t1 + h * i as f64)).collect();
    let halves: Vec<f64> = (0..n).map(|i| lv(t1 + h * (i as f64 + 0.5))).collect();
    if nodes.iter().chain(halves.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Oracle(String::from(
            "v must be positive and finite on the interval",
        )));
    }
    let h2 = h * h;
    let m = n - 1;
    let mut d = Vec::with_capacity(m);
    let mut e2 = Vec::with_capacity(m);
    for i in 0..m {
        d.push(((halves[i] - nodes[i]).exp() + (halves[i + 1] - nodes[i]).exp()) / h2);
        if i + 1 < m {
            let e = (halves[i + 1] - 0.5 * (nodes[i] + nodes[i + 1])).exp() / h2;
            e2.push(e * e);
        }
    }
    // Number of eigenvalues below x (Sturm sequence).
    let below = |x: f64| -> usize {
        let mut cnt = 0;
        let mut q = d[0] - x;
        for i in 0..m {
            if i > 0 {
                let prev = if q == 0.0 { f64::EPSILON * d[i - 1] } else { q };
                q = d[i] - x - e2[i - 1] / prev;
            }
            if q < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    let mut hi = d.iter().copied().fold(0.0, f64::max) * 2.0;
    let mut lo = 0.0;
    if below(hi) == 0 {
        return Err(Error::Oracle(String::from("Gershgorin bracket failed")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdResult {
    /// Richardson-extrapolated eigenvalue.
    pub value: f64,
    /// λ at n, 2n, 4n.
    pub ladder: [f64; 3],
    /// (λ(n) − λ(2n)) / (λ(2n) − λ(4n)); 4 for second-order convergence.
    pub ratio: f64,
}

/// FD eigenvalue on n, 2n, 4n with Richardson extrapolation.
pub fn fd_eigenvalue_oracle(v: &CoefficientProfile, t1: f64, t2: f64, n: usize) -> Result<FdResult> {
    let l1 = fd_eigenvalue(v, t1, t2, n)?;
    let l2 = fd_eigenvalue(v, t1, t2, 2 * n)?;
    let l4 = fd_eigenvalue(v, t1, t2, 4 * n)?;
    let ratio = (l1 - l2) / (l2 - l4);
    Ok(FdResult {
        value: l4 + (l4 - l2) / 3.0,
        ladder: [l1, l2, l4],
        ratio,
    })
}

/// Full estimate for the super-exponential model at radius R: lower and
/// upper bounds, the asymptotic constant and the FD value on [R, R + L].
pub fn superexp_estimate(
    m: u32,
    a: f64,
    alpha: f64,
    beta: f64,
    r: f64,
    opts: &SpectralOptions,
) -> Result<SpectralEstimate> {
    let v = make_model(ModelKind::SuperExp { m, a, alpha, beta })?;
    let env = GrowthEnvelope::new(1.0, a, alpha, beta)?;
    let mut est = rayleigh_upper_envelope(&v, &env, r, opts)?;
    if beta == 0.0 {
        let low = model_lower_bound(a, alpha, r, m)?;
        est.model_lower_bound = low.model_lower_bound;
        est.params.b_tilde = low.params.b_tilde;
    } else {
        est.notes.push(String::from("model lower bound needs β = 0"));
    }
    let pc = principale_constant(a, alpha, beta)?;
    let scale = r.powf(2.0 * (alpha - 1.0)) * if beta > 0.0 { r.ln().powf(2.0 * beta) } else { 1.0 };
    est.asymptotic_constant = Some(pc.value * scale);
    est.params.c_star = pc.c_star;
    est.params.a = Some(a);
    est.params.alpha = Some(alpha);
    est.params.beta = Some(beta);
    est.params.m = Some(m);
    est.fd_oracle_value = Some(fd_eigenvalue_oracle(&v, r, r + opts.fd_length, opts.fd_n / 4)?.value);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_constant_values() {
        let p = principale_constant(1.0, 2.0, 0.0).unwrap();
        let s2 = 2f64.sqrt();
        assert!((p.c_star.unwrap() - (1.0 + s2)).abs() < 1e-14);
        assert!((p.value - (17.0 + 12.0 * s2)).abs() < 1e-9);
        assert_eq!(principale_constant(2.0, 1.0, 0.0).unwrap().value, 1.0);
        let sub = principale_constant(1.0, 0.5, 0.0).unwrap();
        assert_eq!((sub.value, sub.branch), (0.0, AlphaBranch::Subexponential));
    }

    #[test]
    fn optimal_c_matches_quadratic_root() {
        for alpha in [1.01, 1.5, 2.0, 3.0, 7.0] {
            let k: f64 = 4.0 * (alpha - 1.0) / alpha;
            let root = 0.5 * (k + (k * k + 4.0).sqrt());
            assert!((optimal_c(alpha) - root).abs() < 1e-13 * root);
        }
    }

    #[test]
    fn continuity_at_exponential() {
        let base = principale_constant(1.0, 1.0, 0.0).unwrap().value;
        let mut prev = f64::INFINITY;
        for d in [1e-2, 1e-3, 1e-4, 1e-6] {
            let x = principale_constant(1.0, 1.0 + d, 0.0).unwrap().value;
            let rel = (x - base) / base;
            assert!(rel > 0.0 && rel < prev);
            prev = rel;
        }
        assert!(prev < 1e-2);
        assert!((principale_constant(1.0, 1.0 + 1e-4, 0.0).unwrap().value / base - 1.0) < 1e-2);
    }

    #[test]
    fn lower_bound_examples() {
        let l = model_lower_bound(1.0, 2.0, 10.0, 3).unwrap();
        assert!((l.model_lower_bound.unwrap() - 99.9975).abs() < 1e-10);
        for r in [3.0, 20.0, 100.0] {
            assert_eq!(model_lower_bound(1.0, 1.0, r, 3).unwrap().model_lower_bound, Some(0.25));
        }
        assert!(model_lower_bound(0.01, 2.0, 2.0, 3).is_err());
        // At α = 1 the bound is the max of λ_b over b.
        for k in 1..100 {
            let b = k as f64 / 100.0;
            assert!(lambda_b(1.0, 1.0, b, 20.0) <= 0.25 + 1e-15);
        }
    }

    #[test]
    fn fd_unit_interval() {
        let one = CoefficientProfile::constant(1.0).unwrap();
        let l = fd_eigenvalue(&one, 0.0, core::f64::consts::PI, 512).unwrap();
        assert!((l - 1.0).abs() < 1e-4);
        let r = fd_eigenvalue_oracle(&one, 0.0, core::f64::consts::PI, 64).unwrap();
        assert!((r.ratio - 4.0).abs() < 0.8);
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!(fd_eigenvalue(&one, 0.0, 1.0, 8).is_err());
    }

    #[test]
    fn fd_exponential_weight() {
        let v = CoefficientProfile::growth(GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap());
        let l = fd_eigenvalue(&v, 0.0, 40.0, 2048).unwrap();
        let exact = 0.25 + (core::f64::consts::PI / 40.0).powi(2);
        assert!((l - exact).abs() < 1e-5, "{l}");
        let r = fd_eigenvalue_oracle(&v, 20.0, 60.0, 256).unwrap();
        assert!((r.value - exact).abs() < 1e-8);
    }

    #[test]
    fn fd_on_euler_annulus() {
        let v = make_model(ModelKind::Euclidean { m: 3 }).unwrap();
        let a = CoefficientProfile::power(1.0, -2.0)
            .unwrap()
            .clamped_below(1.0)
            .unwrap();
        let tr = solve_ivp(&v, &a, 1.0, 300.0, &SolverOptions::default()).unwrap();
        let (t1, t2) = (tr.zeros[0].location, tr.zeros[1].location);
        let l = fd_eigenvalue_oracle(&v, t1, t2, 512).unwrap().value;
        assert!(l >= 1.0 / (t2 * t2) && l <= 1.0 / (t1 * t1));
        let q = rayleigh_quotient(&tr, t1, t2).unwrap();
        // The nodal function is a test function for the annulus eigenvalue.
        assert!(l <= q * (1.0 + 1e-6) && q <= 1.0 / (t1 * t1));
    }

    #[test]
    fn rayleigh_superexp_exponential() {
        let est = superexp_estimate(3, 1.0, 1.0, 0.0, 20.0, &SpectralOptions::default()).unwrap();
        let up = est.upper_bound.unwrap();
        assert!((up - 0.25).abs() < 0.05 * 0.25, "{up}");
        assert!(up <= est.potential_at_t2.unwrap() * (1.0 + 1e-8));
        assert_eq!(est.model_lower_bound, Some(0.25));
        let fd = est.fd_oracle_value.unwrap();
        assert!((fd - 0.25).abs() < 0.05 * 0.25);
    }

    #[test]
    fn rayleigh_zero_branch() {
        let v = make_model(ModelKind::Euclidean { m: 2 }).unwrap();
        let a = CoefficientProfile::constant(1.0).unwrap();
        let e = rayleigh_upper(&v, &a, 10.0, &SpectralOptions::default()).unwrap();
        assert_eq!(e.upper_bound, Some(0.0));
    }

    #[test]
    fn index_counts() {
        let env = GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let v = CoefficientProfile::growth(env);
        let a = hypothesis_potential(&env, 2.0).unwrap();
        assert_eq!(a.eval(7.0).unwrap(), 1.0);
        let c = index_lower_bound(&v, &a, &env, 2.0, &[1.5, 50.0, 500.0], &SolverOptions::default()).unwrap();
        assert_eq!(c[0].count, 0);
        let s = 2.0 * core::f64::consts::PI / 3f64.sqrt();
        assert!((c[2].count as f64 - 500.0 / s).abs() < 2.0);
        assert!((c[1].predicted_rate - 1.0 / (2.0 * 3f64.ln())).abs() < 1e-15);
        assert!(c.iter().skip(1).all(|x| x.rate > x.predicted_rate));
    }
}
