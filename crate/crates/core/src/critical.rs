//! Critical functions χ_R, χ, χ_f, χ̃_f and reciprocal tail integrals.
//!
//! Tails are carried in the scaled form J(t) = v(t)∫_t^R ds/v(s), which stays
//! O(1) for fast-growing v; then √χ = 1/(2J) and log∫_t^R ds/v = log J − log v(t).

use alloc::vec::Vec;

use crate::coefficients::{CoefficientProfile, Family, GrowthEnvelope, Side};
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};

/// Evaluation below this floor is refused.
pub const T_MIN: f64 = 1e-8;

fn check_args(profile: &CoefficientProfile, t: f64, upper: f64) -> Result<()> {
    if !(t >= T_MIN) || !(t < upper) || upper > profile.domain_end() {
        return Err(Error::Domain {
            t,
            end: upper.min(profile.domain_end()),
        });
    }
    Ok(())
}

/// (log(1+q) − log(1−q))/q with q = e^{−y}.
fn coth_ratio(y: f64) -> f64 {
    let q = (-y).exp();
    if y > 30.0 {
        let q2 = q * q;
        2.0 * (1.0 + q2 / 3.0 + q2 * q2 / 5.0)
    } else {
        (q.ln_1p() - (-q).ln_1p()) / q
    }
}

fn analytic_scaled_tail(p: &CoefficientProfile, t: f64, upper: f64) -> Option<f64> {
    if !p.jumps().is_empty() {
        return None;
    }
    if let Some(c) = p.clamp() {
        if t < c {
            return None;
        }
    }
    match p.family() {
        Family::Power {
            scale,
            exponent,
            log_exponent,
        } if *log_exponent == 0.0 && *scale > 0.0 => {
            let q = exponent - 1.0;
            if upper.is_infinite() {
                Some(if q > 0.0 { t / q } else { f64::INFINITY })
            } else if q == 0.0 {
                Some(t * (upper / t).ln())
            } else {
                Some(-t * (q * (t / upper).ln()).exp_m1() / q)
            }
        }
        Family::SinhPower { scale, rate, exponent } if *exponent == 1.0 && *scale > 0.0 => {
            let b = *rate;
            let q = (-b * t).exp();
            let far = if upper.is_infinite() {
                0.0
            } else {
                (-b * (upper - t)).exp() * coth_ratio(b * upper)
            };
            Some((1.0 - q * q) / (2.0 * b) * (coth_ratio(b * t) - far))
        }
        Family::Growth(env) if env.exponent == 1.0 && env.log_exponent == 0.0 => {
            Some(-(-env.rate * (upper - t)).exp_m1() / env.rate)
        }
        Family::SuperExp(s) if s.exponent == 1.0 && s.log_exponent == 0.0 && t >= 2.0 => {
            Some(-(-s.rate * (upper - t)).exp_m1() / s.rate)
        }
        Family::Constant(c) if *c > 0.0 => Some(upper - t),
        _ => None,
    }
}

/// Scale for the first chunk of a semi-infinite tail: the local e-folding
/// length of v, bounded to a sensible range.
fn decay_scale(p: &CoefficientProfile, t: f64) -> f64 {
    let dt = 1e-4 * t.max(1.0);
    let d = (p.ln_unchecked(t + dt, Side::Mid) - p.ln_unchecked(t, Side::Mid)) / dt;
    let cap = t.max(1.0);
    if d > 0.0 && d.is_finite() {
        (1.0 / d).clamp(1e-12 * cap, cap)
    } else {
        cap
    }
}

fn numeric_scaled_tail(p: &CoefficientProfile, t: f64, upper: f64, opts: &QuadOptions) -> Result<f64> {
    let lt = p.ln_unchecked(t, Side::Mid);
    let f = |s: f64| (lt - p.ln_unchecked(s, Side::Mid)).exp();
    if upper.is_finite() {
        let br = p.breakpoints(t, upper);
        return Ok(quadrature::integrate_pieces(f, &peak_split(p, t, upper, &br), opts)?.value);
    }
    let far = p.breakpoints(t, f64::INFINITY);
    let last = far.last().copied().unwrap_or(t).max(t);
    let mut head = 0.0;
    if last > t {
        head = quadrature::integrate_pieces(f, &peak_split(p, t, last, &far), opts)?.value;
    }
    let h0 = decay_scale(p, last);
    let tail = quadrature::integrate_tail(f, last, h0, &[], opts)?;
    Ok(head + tail.value)
}

/// v(t)∫_t^R ds/v(s) with explicit quadrature options.
pub fn scaled_tail_with(p: &CoefficientProfile, t: f64, upper: f64, opts: &QuadOptions) -> Result<f64> {
    check_args(p, t, upper)?;
    if let Some(j) = analytic_scaled_tail(p, t, upper) {
        return Ok(j);
    }
    numeric_scaled_tail(p, t, upper, opts)
}

/// v(t)∫_t^R ds/v(s); +∞ when 1/v is not integrable near R.
pub fn scaled_tail(p: &CoefficientProfile, t: f64, upper: f64) -> Result<f64> {
    scaled_tail_with(p, t, upper, &QuadOptions::default())
}

/// log∫_t^R ds/v(s).
pub fn ln_tail_integral(p: &CoefficientProfile, t: f64, upper: f64) -> Result<f64> {
    let j = scaled_tail(p, t, upper)?;
    Ok(j.ln() - p.ln_unchecked(t, Side::Mid))
}

/// ∫_t^R ds/v(s), or +∞ when it diverges.
pub fn tail_integral(p: &CoefficientProfile, t: f64, upper: f64) -> Result<f64> {
    let j = scaled_tail(p, t, upper)?;
    if j.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((j.ln() - p.ln_unchecked(t, Side::Mid)).exp())
}

/// χ_R(t) = (2 v(t) ∫_t^R ds/v)^{-2}.
pub fn chi(p: &CoefficientProfile, t: f64, upper: f64) -> Result<f64> {
    let j = scaled_tail(p, t, upper)?;
    if j.is_infinite() {
        return Err(Error::Divergent { t });
    }
    Ok(1.0 / (4.0 * j * j))
}

/// χ with f in place of v.
pub fn chi_f(env: &GrowthEnvelope, t: f64) -> Result<f64> {
    if !(t > env.lower_limit()) {
        return Err(Error::Domain { t, end: f64::INFINITY });
    }
    chi(&CoefficientProfile::growth(*env), t, f64::INFINITY)
}

/// (f'/(2f))².
pub fn chi_tilde_f(env: &GrowthEnvelope, t: f64) -> Result<f64> {
    if !(t > env.lower_limit()) || !t.is_finite() {
        return Err(Error::Domain { t, end: f64::INFINITY });
    }
    let d = 0.5 * env.log_derivative_raw(t);
    Ok(d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// χ_R with finite R.
    ChiR(f64),
    Chi,
    ChiF,
    ChiTildeF,
}

/// A critical function with a cached scaled-tail table on a geometric grid.
#[derive(Debug, Clone)]
pub struct CriticalCurve {
    variant: Variant,
    profile: CoefficientProfile,
    envelope: Option<GrowthEnvelope>,
    upper: f64,
    grid: Vec<f64>,
    ln_v: Vec<f64>,
    tails: Vec<f64>,
    opts: QuadOptions,
}

impl CriticalCurve {
    /// χ_R (finite `upper`) or χ (infinite) for a profile, cached on
    /// [t_lo, t_hi] with `per_decade` nodes per factor of ten.
    pub fn for_profile(
        profile: &CoefficientProfile,
        upper: f64,
        t_lo: f64,
        t_hi: f64,
        per_decade: usize,
    ) -> Result<Self> {
        let variant = if upper.is_finite() {
            Variant::ChiR(upper)
        } else {
            Variant::Chi
        };
        Self::build(variant, profile.clone(), None, upper, t_lo, t_hi, per_decade)
    }

    /// χ_f or χ̃_f for a growth envelope.
    pub fn for_envelope(env: &GrowthEnvelope, tilde: bool, t_lo: f64, t_hi: f64, per_decade: usize) -> Result<Self> {
        let profile = CoefficientProfile::growth(*env);
        if !(t_lo > env.lower_limit()) {
            return Err(Error::Domain {
                t: t_lo,
                end: f64::INFINITY,
            });
        }
        if tilde {
            return Ok(Self {
                variant: Variant::ChiTildeF,
                profile,
                envelope: Some(*env),
                upper: f64::INFINITY,
                grid: Vec::new(),
                ln_v: Vec::new(),
                tails: Vec::new(),
                opts: QuadOptions::default(),
            });
        }
        Self::build(
            Variant::ChiF,
            profile,
            Some(*env),
            f64::INFINITY,
            t_lo,
            t_hi,
            per_decade,
        )
    }

    fn build(
        variant: Variant,
        profile: CoefficientProfile,
        envelope: Option<GrowthEnvelope>,
        upper: f64,
        t_lo: f64,
        t_hi: f64,
        per_decade: usize,
    ) -> Result<Self> {
        check_args(&profile, t_lo, upper)?;
        let t_hi = t_hi.min(upper);
        if !(t_hi > t_lo) {
            return Err(Error::Domain { t: t_hi, end: upper });
        }
        let opts = QuadOptions::default();
        let mut grid = Vec::new();
        let n = ((t_hi / t_lo).log10() * per_decade.max(4) as f64).ceil().max(2.0) as usize;
        let q = (t_hi / t_lo).powf(1.0 / n as f64);
        let mut t = t_lo;
        while t < t_hi {
            grid.push(t);
            t *= q;
        }
        grid.push(t_hi);
        grid.extend(profile.breakpoints(t_lo, t_hi));
        grid.sort_by(|a, b| a.total_cmp(b));
        grid.dedup();
        let ln_v: Vec<f64> = grid.iter().map(|&s| profile.ln_unchecked(s, Side::Mid)).collect();
        let mut tails = alloc::vec![0.0; grid.len()];
        let last = grid.len() - 1;
        let j_end = if t_hi < upper {
            scaled_tail_with(&profile, t_hi, upper, &opts)?
        } else {
            0.0
        };
        if j_end.is_infinite() {
            return Err(Error::Divergent { t: t_hi });
        }
        tails[last] = j_end;
        for k in (0..last).rev() {
            let seg = segment(&profile, grid[k], ln_v[k], grid[k + 1], &opts)?;
            tails[k] = seg + (ln_v[k] - ln_v[k + 1]).exp() * tails[k + 1];
        }
        Ok(Self {
            variant,
            profile,
            envelope,
            upper,
            grid,
            ln_v,
            tails,
            opts,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Scaled tail J(t) = v(t)∫_t^R ds/v.
    pub fn scaled_tail(&self, t: f64) -> Result<f64> {
        if self.grid.is_empty() {
            let env = self.envelope.expect("tilde curve carries its envelope");
            return Ok(1.0 / env.log_derivative_raw(t));
        }
        let (lo, hi) = (self.grid[0], self.grid[self.grid.len() - 1]);
        if t < lo || t > hi {
            return scaled_tail_with(&self.profile, t, self.upper, &self.opts);
        }
        let k = self.grid.partition_point(|&g| g <= t);
        if k == 0 {
            return Ok(self.tails[0]);
        }
        let i = k - 1;
        if self.grid[i] == t {
            return Ok(self.tails[i]);
        }
        let lt = self.profile.ln_unchecked(t, Side::Mid);
        let seg = segment(&self.profile, t, lt, self.grid[i + 1], &self.opts)?;
        Ok(seg + (lt - self.ln_v[i + 1]).exp() * self.tails[i + 1])
    }

    /// √χ(t) (or √χ̃_f).
    pub fn sqrt_value(&self, t: f64) -> Result<f64> {
        Ok(0.5 / self.scaled_tail(t)?)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let s = self.sqrt_value(t)?;
        Ok(s * s)
    }

    /// log∫_t^R ds/v (not meaningful for χ̃_f).
    pub fn ln_tail(&self, t: f64) -> Result<f64> {
        Ok(self.scaled_tail(t)?.ln() - self.profile.ln_unchecked(t, Side::Mid))
    }

    /// ∫_a^b √χ by adaptive quadrature over the cached grid.
    pub fn integral_sqrt(&self, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
        let mut br: Vec<f64> = self.grid.iter().copied().filter(|&g| g > a && g < b).collect();
        br.extend(self.profile.breakpoints(a, b));
        br.sort_by(|x, y| x.total_cmp(y));
        br.dedup();
        let mut err = None;
        let v = quadrature::integrate(
            |s| match self.sqrt_value(s) {
                Ok(x) => x,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            &br,
            opts,
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(v.value),
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

fn segment(p: &CoefficientProfile, a: f64, ln_va: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
    let br = p.breakpoints(a, b);
    let f = |s: f64| (ln_va - p.ln_unchecked(s, Side::Mid)).exp();
    Ok(quadrature::integrate_pieces(f, &peak_split(p, a, b, &br), opts)?.value)
}

/// Split [a, b] at the breakpoints and at offsets growing by 4× from the
/// local e-folding length of v at a, so that exp(log v(a) − log v(s)),
/// concentrated near a for fast-growing v, is resolved.
fn peak_split(p: &CoefficientProfile, a: f64, b: f64, br: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(br.len() + 40);
    v.push(a);
    v.extend(br.iter().copied().filter(|&x| x > a && x < b));
    let d = decay_scale(p, a);
    let mut off = d;
    while a + off < b && off < 0.25 * (b - a) {
        v.push(a + off);
        off *= 4.0;
    }
    v.push(b);
    v.sort_by(|x, y| x.total_cmp(y));
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{make_model, ModelKind};

    fn euclid(m: u32) -> CoefficientProfile {
        make_model(ModelKind::Euclidean { m }).unwrap()
    }

    #[test]
    fn tail_examples() {
        assert!((tail_integral(&euclid(3), 2.0, f64::INFINITY).unwrap() - 0.5).abs() < 1e-14);
        let e = CoefficientProfile::growth(GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap());
        assert!((tail_integral(&e, 1.0, f64::INFINITY).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
        assert!(tail_integral(&euclid(2), 1.0, f64::INFINITY).unwrap().is_infinite());
        assert!(matches!(
            chi(&euclid(2), 1.0, f64::INFINITY),
            Err(Error::Divergent { .. })
        ));
    }

    #[test]
    fn chi_examples() {
        assert!((chi(&euclid(4), 2.0, f64::INFINITY).unwrap() - 0.25).abs() < 1e-14);
        let e = CoefficientProfile::growth(GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap());
        assert!((chi(&e, 5.0, f64::INFINITY).unwrap() - 0.25).abs() < 1e-14);
        let h = make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 }).unwrap();
        let r = chi(&h, 20.0, f64::INFINITY).unwrap() / (0.25 / 20.0f64.tanh());
        assert!((r - 1.0).abs() < 1e-3);
    }

    #[test]
    fn refuses_below_floor() {
        assert!(chi(&euclid(3), 1e-9, f64::INFINITY).is_err());
        assert!(chi(&euclid(3), 2.0, 1.0).is_err());
    }

    #[test]
    fn analytic_matches_numeric() {
        let opts = QuadOptions::default();
        let e3 = euclid(3);
        let clamp = e3.clone().clamped_below(1e-3).unwrap();
        for &(t, r) in &[(0.5, f64::INFINITY), (2.0, 7.0), (10.0, f64::INFINITY)] {
            let a = scaled_tail(&e3, t, r).unwrap();
            let n = numeric_scaled_tail(&clamp, t, r, &opts).unwrap();
            assert!((a - n).abs() < 1e-8 * a, "t={t} r={r}: {a} vs {n}");
        }
        let h = make_model(ModelKind::Hyperbolic { m: 2, b: 1.5 }).unwrap();
        for &(t, r) in &[(0.01, f64::INFINITY), (1.0, 3.0), (40.0, f64::INFINITY)] {
            let a = scaled_tail(&h, t, r).unwrap();
            let n = numeric_scaled_tail(&h, t, r, &opts).unwrap();
            assert!((a - n).abs() < 1e-8 * a, "t={t} r={r}: {a} vs {n}");
        }
    }

    #[test]
    fn tilde_examples() {
        let e = GrowthEnvelope::new(1.0, 3.0, 1.0, 0.0).unwrap();
        assert!((chi_tilde_f(&e, 0.5).unwrap() - 2.25).abs() < 1e-14);
        let q = GrowthEnvelope::new(1.0, 1.0, 2.0, 0.0).unwrap();
        assert!((chi_tilde_f(&q, 3.0).unwrap() - 9.0).abs() < 1e-12);
        let r = chi_tilde_f(&q, 50.0).unwrap() / chi_f(&q, 50.0).unwrap();
        assert!((r - 1.0).abs() < 0.02);
    }

    #[test]
    fn curve_matches_pointwise() {
        let h = make_model(ModelKind::Hyperbolic { m: 3, b: 1.0 }).unwrap();
        let c = CriticalCurve::for_profile(&h, f64::INFINITY, 0.1, 30.0, 16).unwrap();
        for &t in &[0.1, 0.37, 2.0, 9.9, 30.0] {
            let a = c.value(t).unwrap();
            let b = chi(&h, t, f64::INFINITY).unwrap();
            assert!((a - b).abs() < 1e-8 * b, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn fast_growth_curve_matches_log_derivative() {
        // For rapidly growing v, √χ ≈ ½ (log v)' with relative error O(1/(t (log v)')).
        let v = make_model(ModelKind::SuperExp {
            m: 3,
            a: 0.5,
            alpha: 1.5,
            beta: 1.0,
        })
        .unwrap();
        let c = CriticalCurve::for_profile(&v, f64::INFINITY, 1.0, 1e6, 16).unwrap();
        for t in [1e3, 3e3, 1e4, 1e5] {
            let d = 0.5 * (1.5 * t.sqrt() * t.ln() + t.sqrt());
            let s = c.sqrt_value(t).unwrap();
            assert!((s / (0.5 * d) - 1.0).abs() < 1e-3, "t = {t}: {s}");
            let direct = chi(&v, t, f64::INFINITY).unwrap().sqrt();
            assert!((s / direct - 1.0).abs() < 1e-8);
        }
    }
}
