//! Coefficient profiles v(t), A(t) and growth envelopes f(t).

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::error::{parameter, Error, Result};

/// Which one-sided value to return at a jump location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Mid,
    Right,
}

/// f(t) = Λ exp{a t^α log^β t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEnvelope {
    pub scale: f64,
    pub rate: f64,
    pub exponent: f64,
    pub log_exponent: f64,
}

impl GrowthEnvelope {
    pub fn new(scale: f64, rate: f64, exponent: f64, log_exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(parameter(format!("envelope scale must be positive, got {scale}")));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(parameter(format!("envelope rate must be positive, got {rate}")));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(parameter(format!("envelope exponent must be positive, got {exponent}")));
        }
        if !(log_exponent >= 0.0 && log_exponent.is_finite()) {
            return Err(parameter(format!(
                "envelope log-exponent must be nonnegative, got {log_exponent}"
            )));
        }
        Ok(Self {
            scale,
            rate,
            exponent,
            log_exponent,
        })
    }

    /// Smallest admissible argument: log^β t needs t > 1 once β > 0.
    pub fn lower_limit(&self) -> f64 {
        if self.log_exponent > 0.0 {
            1.0
        } else {
            0.0
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if t > self.lower_limit() && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { t, end: f64::INFINITY })
        }
    }

    /// a t^α log^β t, the exponent of f/Λ.
    pub(crate) fn phase(&self, t: f64) -> f64 {
        let p = self.rate * t.powf(self.exponent);
        if self.log_exponent == 0.0 {
            p
        } else {
            p * t.ln().powf(self.log_exponent)
        }
    }

    pub fn ln_value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.scale.ln() + self.phase(t))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.ln_value(t)?.exp())
    }

    /// f'/f without the t > 1 restriction (valid for t > 0 when β = 0).
    pub(crate) fn log_derivative_raw(&self, t: f64) -> f64 {
        let (a, al, be) = (self.rate, self.exponent, self.log_exponent);
        if be == 0.0 {
            return a * al * t.powf(al - 1.0);
        }
        let l = t.ln();
        a * t.powf(al - 1.0) * (al * l.powf(be) + be * l.powf(be - 1.0))
    }
}

/// f'(t)/f(t) = a t^{α−1}(α log^β t + β log^{β−1} t), defined for t > 1.
pub fn envelope_log_derivative(env: &GrowthEnvelope, t: f64) -> Result<f64> {
    if !(t > 1.0 && t.is_finite()) {
        return Err(Error::Domain { t, end: f64::INFINITY });
    }
    Ok(env.log_derivative_raw(t))
}

/// Closed-form families and sampled tables.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// scale · t^exponent · log^log_exponent t.
    Power {
        scale: f64,
        exponent: f64,
        log_exponent: f64,
    },
    /// scale · sinh(rate·t)^exponent.
    SinhPower {
        scale: f64,
        rate: f64,
        exponent: f64,
    },
    /// scale · coth(rate·t).
    Coth {
        scale: f64,
        rate: f64,
    },
    Constant(f64),
    Growth(GrowthEnvelope),
    SuperExp(SuperExp),
    Table(Table),
}

/// r^{m−1} on (0,1], exp{a r^α log^β r} on [2,∞), monotone C¹ bridge in
/// log-space on [1,2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperExp {
    pub m: u32,
    pub rate: f64,
    pub exponent: f64,
    pub log_exponent: f64,
    /// Bridge on [1,2] in log space: log v at 1, slopes at 1 and 2, blend
    /// exponent k and bump weight c.
    bridge: [f64; 5],
}

impl SuperExp {
    fn new(m: u32, rate: f64, exponent: f64, log_exponent: f64) -> Result<Self> {
        let env = GrowthEnvelope::new(1.0, rate, exponent, log_exponent)?;
        let l1 = 0.0;
        let d1 = (m - 1) as f64;
        let rise = env.phase(2.0) - l1;
        let d2 = env.log_derivative_raw(2.0);
        if !(rise > 0.0) {
            return Err(parameter(format!(
                "superexp needs log v(2) > log v(1), got rise {rise}"
            )));
        }
        // Slope g(u) = d1(1−u)^k + d2 u^k + c u(1−u) with ∫g = rise; k is
        // large enough that c ≥ 0, so g ≥ 0 and the bridge is monotone.
        let k = 3f64.max((d1 + d2) / rise);
        let c = 6.0 * (rise - (d1 + d2) / (k + 1.0));
        Ok(Self {
            m,
            rate,
            exponent,
            log_exponent,
            bridge: [l1, d1, d2, k, c],
        })
    }

    fn ln_value(&self, t: f64) -> f64 {
        if t <= 1.0 {
            (self.m - 1) as f64 * t.ln()
        } else if t < 2.0 {
            let [l1, d1, d2, k, c] = self.bridge;
            let u = t - 1.0;
            l1 + d1 * (1.0 - (1.0 - u).powf(k + 1.0)) / (k + 1.0)
                + d2 * u.powf(k + 1.0) / (k + 1.0)
                + c * (u * u / 2.0 - u * u * u / 3.0)
        } else {
            let p = self.rate * t.powf(self.exponent);
            if self.log_exponent == 0.0 {
                p
            } else {
                p * t.ln().powf(self.log_exponent)
            }
        }
    }

    fn value(&self, t: f64) -> f64 {
        if t <= 1.0 {
            t.powi(self.m as i32 - 1)
        } else {
            self.ln_value(t).exp()
        }
    }

    pub fn envelope(&self) -> GrowthEnvelope {
        GrowthEnvelope {
            scale: 1.0,
            rate: self.rate,
            exponent: self.exponent,
            log_exponent: self.log_exponent,
        }
    }
}

/// Piecewise-linear samples; each piece is continuous, pieces meet at jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pieces: Vec<Vec<(f64, f64)>>,
}

impl Table {
    fn piece_value(piece: &[(f64, f64)], t: f64) -> f64 {
        let i = piece.partition_point(|p| p.0 <= t);
        if i == 0 {
            return piece[0].1;
        }
        if i >= piece.len() {
            return piece[piece.len() - 1].1;
        }
        let (t0, v0) = piece[i - 1];
        let (t1, v1) = piece[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().flat_map(|p| p.iter().map(|s| s.0))
    }
}

/// A downward jump with its stored point value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub left: f64,
    pub right: f64,
    pub mid: f64,
}

/// The three model-manifold generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Euclidean { m: u32 },
    Hyperbolic { m: u32, b: f64 },
    SuperExp { m: u32, a: f64, alpha: f64, beta: f64 },
}

/// A nonnegative coefficient function on (0, R).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    family: Family,
    domain_end: f64,
    jumps: Vec<Jump>,
    /// Evaluate the family at max(t, clamp).
    clamp: Option<f64>,
}

fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - core::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        stable_sinh(x).ln()
    }
}

fn stable_sinh(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let e = x.exp_m1();
        0.5 * (e + e / (e + 1.0))
    } else {
        x.sinh()
    }
}

fn nonneg(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(parameter(format!("{name} must be finite and nonnegative, got {x}")))
    }
}

impl CoefficientProfile {
    fn with_family(family: Family) -> Self {
        Self {
            family,
            domain_end: f64::INFINITY,
            jumps: Vec::new(),
            clamp: None,
        }
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        Self::power_log(scale, exponent, 0.0)
    }

    /// scale · t^p · log^q t; with q > 0 the profile needs a clamp above 1.
    pub fn power_log(scale: f64, exponent: f64, log_exponent: f64) -> Result<Self> {
        nonneg("power scale", scale)?;
        nonneg("log exponent", log_exponent)?;
        if !exponent.is_finite() {
            return Err(parameter("power exponent must be finite"));
        }
        Ok(Self::with_family(Family::Power {
            scale,
            exponent,
            log_exponent,
        }))
    }

    pub fn sinh_power(scale: f64, rate: f64, exponent: f64) -> Result<Self> {
        nonneg("sinh scale", scale)?;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(parameter(format!("sinh rate must be positive, got {rate}")));
        }
        if !exponent.is_finite() {
            return Err(parameter("sinh exponent must be finite"));
        }
        Ok(Self::with_family(Family::SinhPower { scale, rate, exponent }))
    }

    pub fn coth(scale: f64, rate: f64) -> Result<Self> {
        nonneg("coth scale", scale)?;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(parameter(format!("coth rate must be positive, got {rate}")));
        }
        Ok(Self::with_family(Family::Coth { scale, rate }))
    }

    pub fn constant(c: f64) -> Result<Self> {
        nonneg("constant", c)?;
        Ok(Self::with_family(Family::Constant(c)))
    }

    pub fn growth(env: GrowthEnvelope) -> Self {
        Self::with_family(Family::Growth(env))
    }

    /// Monotone piecewise-linear table from sorted samples, with downward
    /// jumps `(location, left, right)` strictly inside the sample range.
    pub fn table(samples: &[(f64, f64)], jumps: &[(f64, f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(parameter("a sampled table needs at least two samples"));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(parameter(format!(
                    "table abscissae must be strictly increasing (at t = {})",
                    w[1].0
                )));
            }
        }
        for &(t, v) in samples {
            if !t.is_finite() || t < 0.0 {
                return Err(parameter(format!("table abscissa {t} is invalid")));
            }
            nonneg("table value", v)?;
        }
        let (t_first, t_last) = (samples[0].0, samples[samples.len() - 1].0);
        let mut js: Vec<(f64, f64, f64)> = jumps.to_vec();
        js.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pieces = Vec::new();
        let mut current: Vec<(f64, f64)> = Vec::new();
        let mut si = 0;
        let mut stored = Vec::new();
        for &(at, left, right) in &js {
            if !(at > t_first && at < t_last) {
                return Err(parameter(format!("jump at {at} outside the table range")));
            }
            nonneg("jump left value", left)?;
            nonneg("jump right value", right)?;
            if left < right {
                return Err(parameter(format!(
                    "jump at {at} must be downward (left {left} < right {right})"
                )));
            }
            while si < samples.len() && samples[si].0 < at {
                current.push(samples[si]);
                si += 1;
            }
            if si < samples.len() && samples[si].0 == at {
                si += 1;
            }
            current.push((at, left));
            pieces.push(core::mem::take(&mut current));
            current.push((at, right));
            stored.push(Jump {
                at,
                left,
                right,
                mid: 0.5 * (left + right),
            });
        }
        current.extend_from_slice(&samples[si..]);
        pieces.push(current);
        let mut p = Self::with_family(Family::Table(Table { pieces }));
        p.jumps = stored;
        p.domain_end = t_last;
        Ok(p)
    }

    /// Evaluate the family at max(t, t_c) instead of t.
    pub fn clamped_below(mut self, t_c: f64) -> Result<Self> {
        if !(t_c > 0.0 && t_c.is_finite()) {
            return Err(parameter(format!("clamp point must be positive, got {t_c}")));
        }
        self.clamp = Some(t_c);
        Ok(self)
    }

    /// Restrict the domain to (0, end).
    pub fn truncated(mut self, end: f64) -> Result<Self> {
        if !(end > 0.0) || end > self.domain_end {
            return Err(parameter(format!("invalid domain end {end}")));
        }
        self.domain_end = end;
        Ok(self)
    }

    /// Multiply the profile by `ratio` ∈ (0, 1] for t > `at`, recording a
    /// downward jump with its midpoint value. Not available for tables,
    /// which declare jumps with their samples.
    pub fn with_jump(mut self, at: f64, ratio: f64) -> Result<Self> {
        if matches!(self.family, Family::Table(_)) {
            return Err(parameter("tables declare jumps with their samples"));
        }
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(parameter(format!("jump ratio must lie in (0,1], got {ratio}")));
        }
        if !(at > 0.0 && at < self.domain_end) {
            return Err(parameter(format!("jump location {at} outside the domain")));
        }
        if self.jumps.iter().any(|j| j.at == at) {
            return Err(parameter(format!("duplicate jump at {at}")));
        }
        let left = self.eval_side(at, Side::Left)?;
        let right = left * ratio;
        self.jumps.push(Jump {
            at,
            left,
            right,
            mid: 0.5 * (left + right),
        });
        self.jumps.sort_by(|a, b| a.at.total_cmp(&b.at));
        // Later jumps were recorded against the old profile; rescale them.
        let mut factor = 1.0;
        let mut out = Vec::with_capacity(self.jumps.len());
        for j in &self.jumps {
            let base = self.family_value(j.at) * factor;
            let r = if j.left > 0.0 { j.right / j.left } else { 1.0 };
            let right = base * r;
            out.push(Jump {
                at: j.at,
                left: base,
                right,
                mid: 0.5 * (base + right),
            });
            factor *= r;
        }
        self.jumps = out;
        Ok(self)
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn clamp(&self) -> Option<f64> {
        self.clamp
    }

    fn in_domain(&self, t: f64) -> Result<()> {
        if t > 0.0 && t < self.domain_end {
            Ok(())
        } else {
            Err(Error::Domain {
                t,
                end: self.domain_end,
            })
        }
    }

    fn arg(&self, t: f64) -> f64 {
        match self.clamp {
            Some(c) if t < c => c,
            _ => t,
        }
    }

    fn family_value(&self, t: f64) -> f64 {
        let x = self.arg(t);
        match &self.family {
            Family::Power {
                scale,
                exponent,
                log_exponent,
            } => {
                let p = if *exponent == 0.0 {
                    *scale
                } else if exponent.fract() == 0.0 && exponent.abs() < 64.0 {
                    scale * x.powi(*exponent as i32)
                } else {
                    scale * x.powf(*exponent)
                };
                if *log_exponent == 0.0 {
                    p
                } else {
                    p * x.ln().max(0.0).powf(*log_exponent)
                }
            }
            Family::SinhPower { scale, rate, exponent } => {
                if *exponent == 1.0 {
                    scale * stable_sinh(rate * x)
                } else {
                    scale * (exponent * ln_sinh(rate * x)).exp()
                }
            }
            Family::Coth { scale, rate } => {
                let y = rate * x;
                if y > 20.0 {
                    *scale * (1.0 + 2.0 * (-2.0 * y).exp())
                } else {
                    scale * (1.0 + 2.0 / (2.0 * y).exp_m1())
                }
            }
            Family::Constant(c) => *c,
            Family::Growth(env) => (env.scale.ln() + env.phase(x)).exp(),
            Family::SuperExp(s) => s.value(x),
            Family::Table(tab) => {
                let i = self.jumps.partition_point(|j| j.at < x);
                Table::piece_value(&tab.pieces[i], x)
            }
        }
    }

    fn family_ln_value(&self, t: f64) -> f64 {
        let x = self.arg(t);
        match &self.family {
            Family::Power {
                scale,
                exponent,
                log_exponent,
            } => {
                let mut l = scale.ln() + exponent * x.ln();
                if *log_exponent != 0.0 {
                    l += log_exponent * x.ln().max(0.0).ln();
                }
                l
            }
            Family::SinhPower { scale, rate, exponent } => scale.ln() + exponent * ln_sinh(rate * x),
            Family::Growth(env) => env.scale.ln() + env.phase(x),
            Family::SuperExp(s) => s.ln_value(x),
            _ => self.family_value(t).ln(),
        }
    }

    /// Multiplicative factor accumulated from jumps strictly left of t
    /// (closed-form families only).
    fn jump_ln_factor(&self, t: f64) -> f64 {
        if matches!(self.family, Family::Table(_)) {
            return 0.0;
        }
        let mut l = 0.0;
        for j in &self.jumps {
            if j.at < t && j.left > 0.0 {
                l += (j.right / j.left).ln();
            } else if j.at >= t {
                break;
            }
        }
        l
    }

    fn jump_at(&self, t: f64) -> Option<&Jump> {
        let i = self.jumps.partition_point(|j| j.at < t);
        self.jumps.get(i).filter(|j| j.at == t)
    }

    /// Point value; the stored midpoint at a jump.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.eval_side(t, Side::Mid)
    }

    /// Point value with an explicit side at jump locations.
    pub fn eval_side(&self, t: f64, side: Side) -> Result<f64> {
        self.in_domain(t)?;
        Ok(self.value_unchecked(t, side))
    }

    pub(crate) fn value_unchecked(&self, t: f64, side: Side) -> f64 {
        if let Some(j) = self.jump_at(t) {
            return match side {
                Side::Left => j.left,
                Side::Mid => j.mid,
                Side::Right => j.right,
            };
        }
        let base = self.family_value(t);
        if self.jumps.is_empty() || matches!(self.family, Family::Table(_)) {
            base
        } else {
            base * self.jump_ln_factor(t).exp()
        }
    }

    /// log of the point value; avoids overflow for fast-growing families.
    pub fn ln_eval(&self, t: f64, side: Side) -> Result<f64> {
        self.in_domain(t)?;
        Ok(self.ln_unchecked(t, side))
    }

    pub(crate) fn ln_unchecked(&self, t: f64, side: Side) -> f64 {
        if let Some(j) = self.jump_at(t) {
            let v = match side {
                Side::Left => j.left,
                Side::Mid => j.mid,
                Side::Right => j.right,
            };
            return v.ln();
        }
        self.family_ln_value(t) + self.jump_ln_factor(t)
    }

    /// lim_{t→0+} of the profile.
    pub fn origin_limit(&self) -> f64 {
        if let Some(c) = self.clamp {
            return self.family_value(c);
        }
        match &self.family {
            Family::Power {
                scale,
                exponent,
                log_exponent,
            } => {
                if *scale == 0.0 {
                    0.0
                } else if *log_exponent > 0.0 {
                    f64::NAN
                } else if *exponent > 0.0 {
                    0.0
                } else if *exponent == 0.0 {
                    *scale
                } else {
                    f64::INFINITY
                }
            }
            Family::SinhPower { scale, exponent, .. } => {
                if *exponent > 0.0 {
                    0.0
                } else if *exponent == 0.0 {
                    *scale
                } else {
                    f64::INFINITY
                }
            }
            Family::Coth { scale, .. } => {
                if *scale == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Family::Constant(c) => *c,
            Family::Growth(env) => {
                if env.log_exponent > 0.0 {
                    f64::NAN
                } else {
                    env.scale
                }
            }
            Family::SuperExp(_) => 0.0,
            Family::Table(t) => t.pieces[0][0].1,
        }
    }

    /// Interior points where the profile is nonsmooth: jumps, the clamp
    /// point, family seams and table knots.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self.jumps.iter().map(|j| j.at).collect();
        if let Some(c) = self.clamp {
            pts.push(c);
        }
        match &self.family {
            Family::SuperExp(_) => {
                pts.push(1.0);
                pts.push(2.0);
            }
            Family::Table(tab) => pts.extend(tab.knots()),
            _ => {}
        }
        pts.retain(|&p| p > a && p < b);
        pts.sort_by(|x, y| x.total_cmp(y));
        pts.dedup();
        pts
    }

    /// Volume-type profiles vanish at the origin.
    pub fn is_volume_type(&self) -> bool {
        self.origin_limit() == 0.0
    }

    /// Check positivity and finiteness (in log scale) on a sample of
    /// (0, horizon], so that 1/v is bounded on compacts.
    pub fn check_positive(&self, horizon: f64) -> Result<()> {
        let end = horizon.min(self.domain_end);
        let o = self.origin_limit();
        if !(o >= 0.0 && o.is_finite()) {
            return Err(crate::error::precondition(format!(
                "profile must have a finite nonnegative origin limit, got {o}"
            )));
        }
        for t in sample_grid(end, 400) {
            let l = self.ln_unchecked(t, Side::Mid);
            if !(l.is_finite()) {
                return Err(crate::error::precondition(format!(
                    "volume profile must be positive and finite in log scale, got log v = {l} at t = {t}"
                )));
            }
        }
        Ok(())
    }

    /// Check A ≥ 0 on a sample of (0, horizon].
    pub fn check_potential(&self, horizon: f64) -> Result<()> {
        let end = horizon.min(self.domain_end);
        for t in sample_grid(end, 400) {
            let a = self.value_unchecked(t, Side::Mid);
            if !(a >= 0.0) || !a.is_finite() {
                return Err(crate::error::precondition(format!(
                    "potential must be finite and nonnegative, got {a} at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Geometric-plus-uniform sample of (0, end] used by precondition checks.
pub fn sample_grid(end: f64, n: usize) -> Vec<f64> {
    let end = if end.is_finite() { end } else { 1e6 };
    let mut out = Vec::with_capacity(2 * n + 2);
    let lo = (end * 1e-6).min(1e-3);
    let q = (end / lo).powf(1.0 / n as f64);
    let mut t = lo;
    for _ in 0..n {
        out.push(t);
        t *= q;
    }
    for k in 1..=n {
        out.push(end * k as f64 / n as f64 * (1.0 - 1e-12));
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Model-manifold volume generators.
pub fn make_model(kind: ModelKind) -> Result<CoefficientProfile> {
    match kind {
        ModelKind::Euclidean { m } => {
            check_dim(m)?;
            CoefficientProfile::power(1.0, (m - 1) as f64)
        }
        ModelKind::Hyperbolic { m, b } => {
            check_dim(m)?;
            if !(b > 0.0 && b.is_finite()) {
                return Err(parameter(format!("hyperbolic B must be positive, got {b}")));
            }
            CoefficientProfile::sinh_power(1.0, b, (m - 1) as f64)
        }
        ModelKind::SuperExp { m, a, alpha, beta } => {
            check_dim(m)?;
            if !(alpha >= 1.0) {
                return Err(parameter(format!("superexp α must be at least 1, got {alpha}")));
            }
            let s = SuperExp::new(m, a, alpha, beta)?;
            Ok(CoefficientProfile::with_family(Family::SuperExp(s)))
        }
    }
}

fn check_dim(m: u32) -> Result<()> {
    if m >= 2 {
        Ok(())
    } else {
        Err(parameter(format!("dimension m must be at least 2, got {m}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let e3 = make_model(ModelKind::Euclidean { m: 3 }).unwrap();
        assert_eq!(e3.eval(2.0).unwrap(), 4.0);
        assert_eq!(e3.eval(5.0).unwrap(), 25.0);
        let h = make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 }).unwrap();
        assert!((h.eval(1.0).unwrap() - 1.0f64.sinh()).abs() < 1e-15);
        let s = make_model(ModelKind::SuperExp {
            m: 3,
            a: 1.0,
            alpha: 1.0,
            beta: 0.0,
        })
        .unwrap();
        assert!((s.eval(3.0).unwrap() - 3.0f64.exp()).abs() < 1e-12);
        assert!(e3.origin_limit() == 0.0 && h.origin_limit() == 0.0 && s.origin_limit() == 0.0);
    }

    #[test]
    fn invalid_models() {
        assert!(make_model(ModelKind::Euclidean { m: 1 }).is_err());
        assert!(make_model(ModelKind::Hyperbolic { m: 3, b: 0.0 }).is_err());
        assert!(make_model(ModelKind::SuperExp {
            m: 3,
            a: 1.0,
            alpha: 0.5,
            beta: 0.0
        })
        .is_err());
    }

    #[test]
    fn table_jump_midpoint() {
        let p = CoefficientProfile::table(&[(0.0, 0.0), (2.0, 4.0)], &[(1.0, 2.0, 1.0)]).unwrap();
        assert_eq!(p.eval(1.0).unwrap(), 1.5);
        assert_eq!(p.eval_side(1.0, Side::Left).unwrap(), 2.0);
        assert_eq!(p.eval_side(1.0, Side::Right).unwrap(), 1.0);
        assert!((p.eval(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((p.eval(1.5).unwrap() - 2.5).abs() < 1e-15);
        assert!(p.eval(2.0).is_err());
        assert!(CoefficientProfile::table(&[(0.0, 0.0), (2.0, 4.0)], &[(1.0, 1.0, 2.0)]).is_err());
    }

    #[test]
    fn closed_form_jump() {
        let p = CoefficientProfile::power(1.0, 2.0)
            .unwrap()
            .with_jump(2.0, 0.5)
            .unwrap();
        assert_eq!(p.eval(2.0).unwrap(), 3.0);
        assert!((p.eval(3.0).unwrap() - 4.5).abs() < 1e-14);
        assert_eq!(p.eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn log_derivative_examples() {
        let e = GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(envelope_log_derivative(&e, 7.0).unwrap(), 1.0);
        let q = GrowthEnvelope::new(1.0, 2.0, 2.0, 0.0).unwrap();
        assert!((envelope_log_derivative(&q, 3.0).unwrap() - 12.0).abs() < 1e-12);
        assert!(envelope_log_derivative(&q, 1.0).is_err());
        assert!(GrowthEnvelope::new(0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn clamp() {
        let a = CoefficientProfile::power(1.0, -2.0)
            .unwrap()
            .clamped_below(1.0)
            .unwrap();
        assert_eq!(a.eval(0.3).unwrap(), 1.0);
        assert_eq!(a.eval(2.0).unwrap(), 0.25);
        assert_eq!(a.breakpoints(0.0, 5.0), alloc::vec![1.0]);
    }

    #[test]
    fn coth_and_sinh_stable() {
        let c = CoefficientProfile::coth(1.0, 1.0).unwrap();
        assert!((c.eval(0.5).unwrap() - 1.0 / 0.5f64.tanh()).abs() < 1e-13);
        assert!((c.eval(30.0).unwrap() - 1.0).abs() < 1e-15);
        let s = CoefficientProfile::sinh_power(1.0, 1.0, 2.0).unwrap();
        assert!((s.eval(1e-5).unwrap() - 1e-10).abs() < 1e-20);
        assert!((s.ln_eval(400.0, Side::Mid).unwrap() - 2.0 * (400.0 - core::f64::consts::LN_2)).abs() < 1e-9);
    }
}
