//! Consecutive-zero gaps and their Riccati level-set decomposition.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::coefficients::{CoefficientProfile, GrowthEnvelope, Side};
use crate::error::{parameter, precondition, Error, Result};
use crate::volterra::{solve_ivp, Diagnostics, SolutionTrack, SolverOptions};

/// Level-set type of the Riccati companion y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelType {
    /// |y| ≤ level.
    Inner,
    /// y > level.
    Above,
    /// y < −level.
    Below,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    pub tau: f64,
    pub t1: f64,
    pub t2: f64,
    /// Lengths in the order g3, g1, g2 on (τ, T1) and g3', g1', g2' on (T1, T2).
    pub lengths: [f64; 6],
    /// Observed nonempty intervals in order.
    pub ordering: Vec<(LevelType, f64, f64)>,
    /// y just before and just after T1.
    pub y_around_t1: (f64, f64),
    pub c: Option<f64>,
    pub alpha: Option<f64>,
}

impl GapRecord {
    pub fn ratio(&self) -> f64 {
        self.t2 / self.tau
    }

    pub fn length_sum(&self) -> f64 {
        self.lengths.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    pub solver: SolverOptions,
    pub z0: f64,
    /// Riccati threshold; the decomposition is at ±level.
    pub level: f64,
    /// Largest horizon tried before giving up.
    pub horizon_cap: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            z0: 1.0,
            level: 1.0,
            horizon_cap: 1e12,
        }
    }
}

/// First crossing of y = level in (lo, hi), y increasing there.
fn crossing(track: &SolutionTrack, lo: f64, hi: f64, level: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    while b - a > tol * b.max(1.0) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if track.riccati_minus(m, level) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Split (lo, hi) where y runs upward from y(lo⁺) to +∞.
fn split(track: &SolutionTrack, lo: f64, hi: f64, start_below: Option<f64>, level: f64, tol: f64) -> [f64; 3] {
    // start_below: y(lo) if finite, None for −∞ (lo is a zero).
    let y0 = start_below.unwrap_or(f64::NEG_INFINITY);
    let s_lo = if y0 < -level {
        crossing(track, lo, hi, -level, tol)
    } else {
        lo
    };
    let s_hi = if y0 <= level {
        crossing(track, s_lo, hi, level, tol)
    } else {
        lo
    };
    [s_lo - lo, s_hi - s_lo, hi - s_hi]
}

/// Decompose the gap after τ on an existing track.
pub fn gap_record(track: &SolutionTrack, tau: f64, level: f64, tol: f64) -> Result<GapRecord> {
    let mut after = track.zeros.iter().filter(|z| z.location > tau);
    let (Some(z1), Some(z2)) = (after.next(), after.next()) else {
        return Err(Error::Horizon {
            horizon: track.end(),
            found: track.zeros.iter().filter(|z| z.location > tau).count(),
            needed: 2,
        });
    };
    let (t1, t2) = (z1.location, z2.location);
    let y_tau = track.riccati_minus(tau, 0.0);
    let y_tau = if y_tau.is_nan() { None } else { Some(y_tau) };
    let a = split(track, tau, t1, y_tau, level, tol);
    let b = split(track, t1, t2, None, level, tol);
    let lengths = [a[0], a[1], a[2], b[0], b[1], b[2]];
    let kinds = [LevelType::Below, LevelType::Inner, LevelType::Above];
    let mut ordering = Vec::new();
    let mut s = tau;
    for (k, &g) in lengths.iter().enumerate() {
        if g > 0.0 {
            ordering.push((kinds[k % 3], s, s + g));
        }
        s += g;
    }
    let d = 1e-6 * (t2 - tau).min(t1 - tau).min(t2 - t1);
    let y_around = (track.riccati_minus(t1 - d, 0.0), track.riccati_minus(t1 + d, 0.0));
    Ok(GapRecord {
        tau,
        t1,
        t2,
        lengths,
        ordering,
        y_around_t1: y_around,
        c: None,
        alpha: None,
    })
}

/// Solve one long track covering two zeros past the largest τ and
/// decompose every gap.
pub fn gap_sweep(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    taus: &[f64],
    opts: &GapOptions,
) -> Result<(SolutionTrack, Vec<GapRecord>)> {
    if taus.is_empty() || taus.iter().any(|t| !(*t > 0.0)) {
        return Err(parameter("τ grid must be nonempty and positive"));
    }
    let tmax = taus.iter().copied().fold(0.0, f64::max);
    let mut h = 4.0 * tmax;
    let track = loop {
        let tr = solve_ivp(v, a, opts.z0, h, &opts.solver)?;
        if tr.zeros.iter().filter(|z| z.location > tmax).count() >= 2 {
            break tr;
        }
        if h >= opts.horizon_cap {
            return Err(Error::Horizon {
                horizon: h,
                found: tr.zeros.iter().filter(|z| z.location > tmax).count(),
                needed: 2,
            });
        }
        h = (h * 4.0).min(opts.horizon_cap);
    };
    let recs = taus
        .iter()
        .map(|&tau| gap_record(&track, tau, opts.level, opts.solver.refine_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok((track, recs))
}

/// ((c+1)/(c−1))^{2/α}.
pub fn gap_bound(c: f64, alpha: f64) -> Result<f64> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(parameter(format!("gap bound needs c > 1, got {c}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(parameter(format!("gap bound needs α > 0, got {alpha}")));
    }
    Ok(((c + 1.0) / (c - 1.0)).powf(2.0 / alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapVerification {
    pub records: Vec<GapRecord>,
    pub bound: f64,
    /// max T2/τ over τ in the top decade of the sweep.
    pub empirical: f64,
    pub slack: f64,
    pub passed: bool,
    pub diagnostics: Diagnostics,
}

/// Check the hypothesis on samples, sweep, and compare the top-decade
/// maximum of T2/τ with the bound.
pub fn verify_gap_bound(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    env: &GrowthEnvelope,
    c: f64,
    taus: &[f64],
    opts: &GapOptions,
) -> Result<GapVerification> {
    let bound = gap_bound(c, env.exponent)?;
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = taus.iter().copied().fold(0.0, f64::max);
    if !(lo > env.lower_limit()) {
        return Err(precondition("τ grid must lie where the envelope is defined"));
    }
    let n = 200;
    for k in 0..=n {
        let t = lo * (hi / lo).powf(k as f64 / n as f64);
        let need = c * 0.5 * env.rate * env.exponent * t.powf(env.exponent - 1.0) * t.ln().powf(env.log_exponent);
        let have = a.eval(t)?.sqrt();
        if have < need * (1.0 - 1e-12) {
            return Err(precondition(format!(
                "√A({t}) = {have} below the hypothesis bound {need}"
            )));
        }
        let lf = env.ln_value(t)?;
        let lv = v.ln_eval(t, Side::Mid)?;
        if lv > lf + 1e-12 * lf.abs().max(1.0) {
            return Err(precondition(format!("v({t}) exceeds the envelope")));
        }
    }
    let (track, mut records) = gap_sweep(v, a, taus, opts)?;
    for r in &mut records {
        r.c = Some(c);
        r.alpha = Some(env.exponent);
    }
    let slack = 0.05;
    let empirical = records
        .iter()
        .filter(|r| r.tau >= hi / 10.0)
        .map(|r| r.ratio())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GapVerification {
        passed: empirical <= bound * (1.0 + slack),
        records,
        bound,
        empirical,
        slack,
        diagnostics: track.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{make_model, ModelKind};
    use core::f64::consts::PI;

    fn exp_v() -> CoefficientProfile {
        CoefficientProfile::growth(GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap())
    }

    #[test]
    fn bound_values() {
        assert!((gap_bound(3.0, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((gap_bound(3.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((gap_bound(1.1, 1.0).unwrap() - 441.0).abs() < 1e-9);
        let (b3, b6) = (gap_bound(1e3, 1.0).unwrap(), gap_bound(1e6, 1.0).unwrap());
        assert!(b6 < b3 && (b6 - 1.0) < 1e-5);
        assert!(gap_bound(1.0, 1.0).is_err());
        assert!(gap_bound(0.5, 1.0).is_err());
    }

    #[test]
    fn constant_coefficient_gaps() {
        let one = CoefficientProfile::constant(1.0).unwrap();
        let taus: Vec<f64> = (1..=10).map(|k| 10.0 * k as f64 + 0.3).collect();
        let (_, recs) = gap_sweep(&exp_v(), &one, &taus, &GapOptions::default()).unwrap();
        let s = 2.0 * PI / 3f64.sqrt();
        for r in &recs {
            assert!((r.t2 - r.t1 - s).abs() < 1e-6);
            assert!((r.length_sum() - (r.t2 - r.tau)).abs() < 1e-9 * r.t2);
            assert!(r.y_around_t1.0 > 1e3 && r.y_around_t1.1 < -1e3);
        }
    }

    #[test]
    fn euler_gap_just_after_zero() {
        let v = make_model(ModelKind::Euclidean { m: 3 }).unwrap();
        let a = CoefficientProfile::power(1.0, -2.0)
            .unwrap()
            .clamped_below(1.0)
            .unwrap();
        let (track, _) = gap_sweep(&v, &a, &[10.0], &GapOptions::default()).unwrap();
        let z = track.zeros[0].location;
        let r = gap_record(&track, z * (1.0 + 1e-9), 1.0, 1e-12).unwrap();
        let expect = (2.0 * PI / (3f64.sqrt() / 2.0)).exp();
        assert!((r.ratio() - expect).abs() < 1e-5 * expect, "{}", r.ratio());
        // Starts at −∞, so the first interval is of type Below.
        assert_eq!(r.ordering[0].0, LevelType::Below);
    }

    #[test]
    fn superexp_square_sweep() {
        let env = GrowthEnvelope::new(1.0, 1.0, 2.0, 0.0).unwrap();
        let v = CoefficientProfile::growth(env);
        let a = CoefficientProfile::power(4.0, 2.0).unwrap();
        let taus: Vec<f64> = (0..=20).map(|k| 1.0 + 0.45 * k as f64).collect();
        let rep = verify_gap_bound(&v, &a, &env, 2.0, &taus, &GapOptions::default()).unwrap();
        assert!((rep.bound - 3.0).abs() < 1e-12);
        assert!(rep.passed, "{}", rep.empirical);
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let env = GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let a = CoefficientProfile::constant(0.5).unwrap();
        let r = verify_gap_bound(&exp_v(), &a, &env, 2.0, &[5.0, 50.0], &GapOptions::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
