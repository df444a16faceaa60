//! Singular Cauchy problem (v z')' + A v z = 0, z(0) = z0, (v z')(0) = 0.
//!
//! The integral form z = z0 − ∫(1/v)∫ A v z is advanced with three-stage
//! Gauss collocation on the first-order system z' = w/v, w' = −A v z. Stage
//! points are interior, so 1/v is never sampled at the origin or at a jump,
//! and nodes are forced at every nonsmooth point. Near the origin v is
//! replaced by v_ε = max(v(ε), v) and ε is halved until the track stops
//! moving. Fluxes are stored divided by v to survive fast-growing volumes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::coefficients::{sample_grid, CoefficientProfile, Side};
use crate::error::{precondition, Error, Result};
use crate::quadrature::{GL5_W, GL5_X};

const SQ15: f64 = 3.872_983_346_207_417;
const C: [f64; 3] = [0.5 - SQ15 / 10.0, 0.5, 0.5 + SQ15 / 10.0];
const A: [[f64; 3]; 3] = [
    [5.0 / 36.0, 2.0 / 9.0 - SQ15 / 15.0, 5.0 / 36.0 - SQ15 / 30.0],
    [5.0 / 36.0 + SQ15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - SQ15 / 24.0],
    [5.0 / 36.0 + SQ15 / 30.0, 2.0 / 9.0 + SQ15 / 15.0, 5.0 / 36.0],
];
const B: [f64; 3] = [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Local relative error per step.
    pub rel_tol: f64,
    /// Ceiling on h·√A, which keeps the Hermite interpolant accurate.
    pub max_phase_step: f64,
    /// Ceiling on the change of log v across one step.
    pub max_log_v_step: f64,
    pub max_step: f64,
    /// First regularization radius.
    pub eps0: f64,
    pub eps_floor: f64,
    /// Regularization Cauchy criterion, relative to z0.
    pub stability_tol: f64,
    /// Integral-equation residual bound, relative to z0.
    pub residual_tol: f64,
    pub max_halvings: usize,
    /// Zero brackets are refined to width refine_tol·max(1, t).
    pub refine_tol: f64,
    /// Zeros closer than this fraction of π/√A are reported as a collision.
    pub separation_floor: f64,
    /// Riccati values are masked where |z| falls below this fraction of the
    /// local amplitude.
    pub near_zero_mask: f64,
    pub max_steps: usize,
    /// Checkpoints forced into the grid, per decade and uniformly.
    pub checkpoints_per_decade: usize,
    pub uniform_checkpoints: usize,
    /// Run the residual check (and fail on it).
    pub verify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_phase_step: 0.05,
            max_log_v_step: 0.25,
            max_step: f64::INFINITY,
            eps0: 4e-4,
            eps_floor: 1e-4,
            stability_tol: 1e-6,
            residual_tol: 1e-6,
            max_halvings: 16,
            refine_tol: 1e-12,
            separation_floor: 1e-4,
            near_zero_mask: 1e-10,
            max_steps: 5_000_000,
            checkpoints_per_decade: 32,
            uniform_checkpoints: 1000,
            verify: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("rel_tol", self.rel_tol),
            ("max_phase_step", self.max_phase_step),
            ("max_log_v_step", self.max_log_v_step),
            ("max_step", self.max_step),
            ("eps0", self.eps0),
            ("eps_floor", self.eps_floor),
            ("stability_tol", self.stability_tol),
            ("residual_tol", self.residual_tol),
            ("refine_tol", self.refine_tol),
            ("separation_floor", self.separation_floor),
            ("near_zero_mask", self.near_zero_mask),
        ];
        for (name, x) in pos {
            if !(x > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {x}")));
            }
        }
        Ok(())
    }
}

/// A refined zero with its sign-change bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub location: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Zero {
    pub fn bracket_width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    t: f64,
    z: f64,
    /// z' from the right, w/v(t⁺).
    p: f64,
    lv_l: f64,
    lv_r: f64,
    a_l: f64,
    a_r: f64,
}

/// Solver diagnostics attached to a track.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// max |residual| / z0 on the verification subgrid.
    pub residual: Option<f64>,
    /// sup |z_ε − z_{ε/2}| / z0 for the accepted ε.
    pub stability: Option<f64>,
    pub steps: usize,
    pub rejected: usize,
}

/// Solution on an adaptive grid.
#[derive(Debug, Clone)]
pub struct SolutionTrack {
    nodes: Vec<Node>,
    v: CoefficientProfile,
    a: CoefficientProfile,
    eps: Option<f64>,
    checkpoints: Vec<(f64, usize)>,
    pub zeros: Vec<Zero>,
    /// y = −w/z per node, `None` where masked; empty until `riccati_track`.
    pub riccati: Vec<Option<f64>>,
    pub near_zero: Vec<bool>,
    pub z0: f64,
    pub start: f64,
    pub initial_flux: f64,
    pub eps_history: Vec<f64>,
    pub diagnostics: Diagnostics,
}

#[allow(clippy::needless_range_loop)]
fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> [f64; 3] {
    let mut a = m;
    let mut b = r;
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

struct Problem<'a> {
    v: &'a CoefficientProfile,
    a: &'a CoefficientProfile,
    eps: Option<f64>,
    lv_eps: f64,
}

impl Problem<'_> {
    fn lv(&self, s: f64, side: Side) -> f64 {
        match self.eps {
            Some(e) if s < e || (s == e && side == Side::Left) => self.lv_eps.max(self.v.ln_unchecked(s, side)),
            _ => self.v.ln_unchecked(s, side),
        }
    }

    fn av(&self, s: f64, side: Side) -> f64 {
        self.a.value_unchecked(s, side)
    }

    fn node(&self, t: f64, z: f64, p: f64) -> Node {
        let (lv_l, a_l) = if t > 0.0 {
            (self.lv(t, Side::Left), self.av(t, Side::Left))
        } else {
            (self.lv_eps, self.a_origin())
        };
        let (lv_r, a_r) = if t > 0.0 {
            (self.lv(t, Side::Right), self.av(t, Side::Right))
        } else {
            (self.lv_eps, self.a_origin())
        };
        Node {
            t,
            z,
            p,
            lv_l,
            lv_r,
            a_l,
            a_r,
        }
    }

    fn a_origin(&self) -> f64 {
        let l = self.a.origin_limit();
        if l.is_finite() {
            l
        } else {
            self.av(self.eps.unwrap_or(1e-8) * 1e-3, Side::Mid)
        }
    }

    /// One collocation step from (t, z, p = w/v(t⁺)) of width h.
    /// Returns (z_b, w_b / v(t⁺)).
    fn step(&self, t: f64, lv_a: f64, z: f64, p: f64, h: f64) -> (f64, f64) {
        let mut lv = [0.0; 3];
        let mut av = [0.0; 3];
        for i in 0..3 {
            let s = t + C[i] * h;
            lv[i] = self.lv(s, Side::Mid);
            av[i] = self.av(s, Side::Mid);
        }
        let mut m = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for i in 0..3 {
            let mut zsum = 0.0;
            for j in 0..3 {
                let e = av[j] * (lv[j] - lv[i]).exp();
                zsum += A[i][j] * e;
                for k in 0..3 {
                    m[i][k] += h * h * A[i][j] * e * A[j][k];
                }
            }
            m[i][i] += 1.0;
            rhs[i] = p * (lv_a - lv[i]).exp() - h * z * zsum;
        }
        let ps = solve3(m, rhs);
        let mut zb = z;
        let mut ub = p;
        for j in 0..3 {
            let mut zj = z;
            for k in 0..3 {
                zj += h * A[j][k] * ps[k];
            }
            zb += h * B[j] * ps[j];
            ub -= h * B[j] * av[j] * (lv[j] - lv_a).exp() * zj;
        }
        (zb, ub)
    }
}

fn checkpoint_grid(start: f64, horizon: f64, opts: &SolverOptions) -> Vec<f64> {
    let mut pts = Vec::new();
    let lo = if start > 0.0 { start } else { (horizon * 1e-6).min(1e-3) };
    if opts.checkpoints_per_decade > 0 && horizon > lo {
        let q = 10f64.powf(1.0 / opts.checkpoints_per_decade as f64);
        let mut t = lo * q;
        while t < horizon {
            pts.push(t);
            t *= q;
        }
    }
    let n = opts.uniform_checkpoints;
    for k in 1..=n {
        let t = start + (horizon - start) * k as f64 / n as f64;
        if t > start && t <= horizon {
            pts.push(t);
        }
    }
    pts.push(horizon);
    pts.retain(|&t| t > start && t <= horizon);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|b, a| near(*a, *b));
    pts
}

/// Nodes closer than this are merged; steps that short only carry roundoff.
fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

struct Raw {
    nodes: Vec<Node>,
    checkpoints: Vec<(f64, usize)>,
    steps: usize,
    rejected: usize,
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    start: f64,
    z0: f64,
    p0: f64,
    eps: Option<f64>,
    horizon: f64,
    checkpoints: &[f64],
    opts: &SolverOptions,
    stop_after: Option<usize>,
) -> Result<Raw> {
    let lv_eps = eps.map(|e| v.ln_unchecked(e, Side::Mid)).unwrap_or(0.0);
    let pb = Problem { v, a, eps, lv_eps };
    // Breakpoints and the horizon are kept exactly; checkpoints falling on
    // top of them are dropped.
    let mut hard: Vec<f64> = v.breakpoints(start, horizon);
    hard.extend(a.breakpoints(start, horizon));
    hard.push(horizon);
    hard.sort_by(|x, y| x.total_cmp(y));
    let mut forced: Vec<f64> = checkpoints
        .iter()
        .copied()
        .filter(|&c| {
            let k = hard.partition_point(|&x| x < c);
            !(k < hard.len() && near(hard[k], c)) && !(k > 0 && near(hard[k - 1], c))
        })
        .collect();
    forced.extend_from_slice(&hard);
    if let Some(e) = eps {
        forced.push(e);
    }
    forced.retain(|&t| t > start && t <= horizon);
    forced.sort_by(|x, y| x.total_cmp(y));
    forced.dedup();

    let mut nodes = Vec::with_capacity(1024);
    let first = pb.node(start, z0, p0);
    nodes.push(first);
    let mut cp_out = Vec::with_capacity(checkpoints.len());
    let mut ci = 0;
    let mut fi = 0;
    let mut t = start;
    let mut z = z0;
    let mut p = p0;
    let mut lv_r = first.lv_r;
    let mut h = eps.unwrap_or(0.01 * start.max(1.0)).min(horizon - start);
    let mut steps = 0;
    let mut rejected = 0;
    let mut sign_changes = 0;
    while t < horizon {
        if steps + rejected > opts.max_steps {
            return Err(Error::SolverAccuracy {
                detail: format!("step budget exhausted at t = {t}"),
                measured: steps as f64,
                tolerance: opts.max_steps as f64,
            });
        }
        while fi < forced.len() && forced[fi] <= t {
            fi += 1;
        }
        let target = forced[fi];
        // Ceilings from the local oscillation scale and the growth of v.
        let mut hmax = opts.max_step.min(target - t);
        let probe = (t + hmax.min(h * 2.0)).min(target);
        let a_here = pb
            .av(if t > 0.0 { t } else { 0.5 * probe }, Side::Right)
            .max(pb.av(probe, Side::Left));
        let a_mid = pb.av(0.5 * (t + probe), Side::Mid);
        let amax = a_here.max(a_mid);
        if amax > 0.0 {
            hmax = hmax.min(opts.max_phase_step / amax.sqrt());
        }
        let mut hh = h.min(hmax);
        loop {
            if t > 0.0 || eps.is_none() {
                let dl = (pb.lv(t + hh, Side::Left) - lv_r).abs();
                if dl > opts.max_log_v_step && hh > 1e-14 * t.max(1.0) {
                    hh *= 0.5 * opts.max_log_v_step / dl;
                    continue;
                }
            }
            break;
        }
        let proposal = h;
        let hit_target = t + hh >= target * (1.0 - 1e-15) || target - (t + hh) < 1e-13 * t.max(1.0);
        let tb = if hit_target { target } else { t + hh };
        let hh = tb - t;
        let (z1, u1) = pb.step(t, lv_r, z, p, hh);
        let hm = 0.5 * hh;
        let tm = t + hm;
        let (zm, um) = pb.step(t, lv_r, z, p, hm);
        let lv_m = pb.lv(tm, Side::Mid);
        let (z2, u2m) = pb.step(tm, lv_m, zm, um * (lv_r - lv_m).exp(), hm);
        let u2 = u2m * (lv_m - lv_r).exp();
        let err_z = (z1 - z2).abs() / 63.0;
        let err_u = (u1 - u2).abs() / 63.0;
        let sz = z.abs() + z2.abs() + hh * (p.abs() + u2.abs());
        let a_end = pb.av(tb, Side::Left);
        let su = p.abs() + u2.abs() + hh * (a_here.max(a_end) * (z.abs() + z2.abs()));
        let rz = if err_z == 0.0 { 0.0 } else { err_z / (opts.rel_tol * sz) };
        let ru = if err_u == 0.0 { 0.0 } else { err_u / (opts.rel_tol * su) };
        let r = rz.max(ru);
        if !z2.is_finite() || !u2.is_finite() {
            return Err(precondition(format!(
                "solution overflowed near t = {t}; coefficients too large for f64"
            )));
        }
        if r > 1.0 {
            rejected += 1;
            h = hh * (0.9 * r.powf(-1.0 / 7.0)).max(0.1);
            if h < 1e-15 * t.max(1e-300) {
                return Err(Error::SolverAccuracy {
                    detail: format!("step size underflow at t = {t}"),
                    measured: h,
                    tolerance: 1e-15 * t,
                });
            }
            continue;
        }
        steps += 1;
        let grow = if r == 0.0 {
            4.0
        } else {
            (0.9 * r.powf(-1.0 / 7.0)).clamp(0.2, 4.0)
        };
        // A step shortened by a forced node or a ceiling keeps the old proposal.
        h = if hh < proposal {
            (hh * grow).max(proposal)
        } else {
            hh * grow
        };
        let lb_l = pb.lv(tb, Side::Left);
        let lb_r = pb.lv(tb, Side::Right);
        let p_new = u2 * (lv_r - lb_r).exp();
        if z != 0.0 && z2 != 0.0 && (z < 0.0) != (z2 < 0.0) || z2 == 0.0 {
            sign_changes += 1;
        }
        t = tb;
        z = z2;
        p = p_new;
        lv_r = lb_r;
        let mut node = pb.node(t, z, p);
        node.lv_l = lb_l;
        nodes.push(node);
        while ci < checkpoints.len() && checkpoints[ci] <= t {
            if checkpoints[ci] == t {
                cp_out.push((t, nodes.len() - 1));
            }
            ci += 1;
        }
        if let Some(n) = stop_after {
            if sign_changes >= n {
                break;
            }
        }
    }
    Ok(Raw {
        nodes,
        checkpoints: cp_out,
        steps,
        rejected,
    })
}

fn check_inputs(v: &CoefficientProfile, a: &CoefficientProfile, z0: f64, horizon: f64) -> Result<()> {
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(precondition(format!("z0 must be positive, got {z0}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(precondition(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    if horizon > v.domain_end() || horizon > a.domain_end() {
        return Err(precondition(format!(
            "horizon {horizon} exceeds the coefficient domain"
        )));
    }
    a.check_potential(horizon)
}

impl SolutionTrack {
    fn from_raw(
        raw: Raw,
        v: &CoefficientProfile,
        a: &CoefficientProfile,
        eps: Option<f64>,
        z0: f64,
        initial_flux: f64,
    ) -> Self {
        let start = raw.nodes[0].t;
        Self {
            nodes: raw.nodes,
            v: v.clone(),
            a: a.clone(),
            eps,
            checkpoints: raw.checkpoints,
            zeros: Vec::new(),
            riccati: Vec::new(),
            near_zero: Vec::new(),
            z0,
            start,
            initial_flux,
            eps_history: Vec::new(),
            diagnostics: Diagnostics {
                steps: raw.steps,
                rejected: raw.rejected,
                ..Diagnostics::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grid(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.t).collect()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.nodes[i].t
    }

    pub fn z(&self, i: usize) -> f64 {
        self.nodes[i].z
    }

    pub fn z_values(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.z).collect()
    }

    /// w = v z' at node i (may overflow to ±∞ for extreme volumes).
    pub fn flux(&self, i: usize) -> f64 {
        let n = &self.nodes[i];
        if n.p == 0.0 {
            0.0
        } else {
            n.p * n.lv_r.exp()
        }
    }

    /// z' from the right at node i.
    pub fn dz(&self, i: usize) -> f64 {
        self.nodes[i].p
    }

    /// log v(t⁺) as used by the solver (regularized below ε).
    pub fn ln_v(&self, i: usize) -> f64 {
        self.nodes[i].lv_r
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].t
    }

    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn volume(&self) -> &CoefficientProfile {
        &self.v
    }

    pub fn potential(&self) -> &CoefficientProfile {
        &self.a
    }

    /// Node values of z at the forced checkpoints.
    pub fn checkpoint_values(&self) -> Vec<(f64, f64)> {
        self.checkpoints.iter().map(|&(t, i)| (t, self.nodes[i].z)).collect()
    }

    fn step_index(&self, t: f64) -> usize {
        let k = self.nodes.partition_point(|n| n.t <= t);
        k.clamp(1, self.nodes.len() - 1) - 1
    }

    fn lv_at(&self, s: f64) -> f64 {
        match self.eps {
            Some(e) if s <= e => self.nodes[0].lv_r.max(self.v.ln_unchecked(s, Side::Mid)),
            _ => self.v.ln_unchecked(s, Side::Mid),
        }
    }

    /// Hermite data on step i: (h, z_a, dz_a, z_b, dz_b, u_a, du_a, u_b, du_b)
    /// with u = w / v(t_i⁺).
    fn hermite(&self, i: usize) -> [f64; 9] {
        let a = &self.nodes[i];
        let b = &self.nodes[i + 1];
        let h = b.t - a.t;
        let zb_d = b.p * (b.lv_r - b.lv_l).exp();
        let ub = b.p * (b.lv_r - a.lv_r).exp();
        let dua = -a.a_r * a.z;
        let dub = -b.a_l * (b.lv_l - a.lv_r).exp() * b.z;
        [h, a.z, a.p, b.z, zb_d, a.p, dua, ub, dub]
    }

    fn herm(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> f64 {
        let s2 = s * s;
        let s3 = s2 * s;
        y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + h * d0 * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + h * d1 * (s3 - s2)
    }

    /// Interpolated z(t).
    pub fn z_at(&self, t: f64) -> f64 {
        let i = self.step_index(t);
        let [h, za, da, zb, db, ..] = self.hermite(i);
        let s = ((t - self.nodes[i].t) / h).clamp(0.0, 1.0);
        Self::herm(za, da, zb, db, h, s)
    }

    /// Interpolated (z, z') at t; z' = w/v with w from its own Hermite
    /// interpolant (w' = −A v z is known at the nodes).
    pub fn interpolate(&self, t: f64) -> (f64, f64) {
        let i = self.step_index(t);
        let [h, za, da, zb, db, ua, dua, ub, dub] = self.hermite(i);
        let s = ((t - self.nodes[i].t) / h).clamp(0.0, 1.0);
        let z = Self::herm(za, da, zb, db, h, s);
        let u = Self::herm(ua, dua, ub, dub, h, s);
        let lt = if s == 0.0 {
            self.nodes[i].lv_r
        } else if s == 1.0 {
            self.nodes[i + 1].lv_l
        } else {
            self.lv_at(t)
        };
        (z, u * (self.nodes[i].lv_r - lt).exp())
    }

    fn problem(&self) -> Problem<'_> {
        Problem {
            v: &self.v,
            a: &self.a,
            eps: self.eps,
            lv_eps: self.eps.map(|e| self.v.ln_unchecked(e, Side::Mid)).unwrap_or(0.0),
        }
    }

    /// (z, z') at t from a collocation sub-step off the preceding node; as
    /// accurate as the scheme itself, unlike the cubic interpolant.
    pub fn evaluate(&self, t: f64) -> (f64, f64) {
        let i = self.step_index(t);
        let a = &self.nodes[i];
        let h = t - a.t;
        if h <= 0.0 {
            return (a.z, a.p);
        }
        let pb = self.problem();
        let (z, u) = pb.step(a.t, a.lv_r, a.z, a.p, h);
        (z, u * (a.lv_r - pb.lv(t, Side::Mid)).exp())
    }

    /// Riccati value y = −v z'/z at t.
    pub fn riccati_at(&self, t: f64) -> f64 {
        let (z, dz) = self.evaluate(t);
        let lt = self.lv_at(t);
        -(lt.exp()) * dz / z
    }

    /// Sign of y(t) − level using log arithmetic (safe for huge v).
    pub(crate) fn riccati_minus(&self, t: f64, level: f64) -> f64 {
        let (z, dz) = self.evaluate(t);
        if z == 0.0 {
            return f64::NAN;
        }
        let lt = self.lv_at(t);
        let q = -dz / z;
        if q == 0.0 {
            return -level;
        }
        let ly = lt + q.abs().ln();
        if ly > 700.0 {
            return q.signum() * f64::MAX;
        }
        q.signum() * ly.exp() - level
    }
}

/// Solve from the singular origin with z(0) = z0 and vanishing flux.
pub fn solve_ivp(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    z0: f64,
    horizon: f64,
    opts: &SolverOptions,
) -> Result<SolutionTrack> {
    solve_ivp_until(v, a, z0, horizon, opts, None)
}

fn solve_ivp_until(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    z0: f64,
    horizon: f64,
    opts: &SolverOptions,
    stop_after: Option<usize>,
) -> Result<SolutionTrack> {
    opts.validate()?;
    check_inputs(v, a, z0, horizon)?;
    v.check_positive(horizon)?;
    let mut br = v.breakpoints(0.0, horizon);
    br.extend(a.breakpoints(0.0, horizon));
    let first_break = br.iter().copied().fold(horizon, f64::min);
    let mut eps = opts.eps0.min(first_break / 4.0).min(horizon / 16.0);
    let checkpoints = checkpoint_grid(0.0, horizon, opts);
    let mut history = alloc::vec![eps];
    let mut prev = integrate(v, a, 0.0, z0, 0.0, Some(eps), horizon, &checkpoints, opts, stop_after)?;
    let mut halvings = 0;
    loop {
        let e2 = 0.5 * eps;
        let cur = integrate(v, a, 0.0, z0, 0.0, Some(e2), horizon, &checkpoints, opts, stop_after)?;
        history.push(e2);
        let diff = checkpoint_diff(&prev, &cur);
        halvings += 1;
        if e2 <= opts.eps_floor && diff <= opts.stability_tol * z0 {
            let mut track = SolutionTrack::from_raw(cur, v, a, Some(e2), z0, 0.0);
            track.eps_history = history;
            track.diagnostics.stability = Some(diff / z0);
            return finish(track, opts);
        }
        if halvings >= opts.max_halvings {
            return Err(Error::SolverAccuracy {
                detail: format!("regularization did not stabilize down to ε = {e2:e}"),
                measured: diff / z0,
                tolerance: opts.stability_tol,
            });
        }
        prev = cur;
        eps = e2;
    }
}

fn checkpoint_diff(a: &Raw, b: &Raw) -> f64 {
    let mut d: f64 = 0.0;
    let n = a.checkpoints.len().min(b.checkpoints.len());
    for k in 0..n {
        let (ta, ia) = a.checkpoints[k];
        let (tb, ib) = b.checkpoints[k];
        debug_assert_eq!(ta, tb);
        d = d.max((a.nodes[ia].z - b.nodes[ib].z).abs());
    }
    d
}

/// Solve the regular Cauchy problem z(t0) = z0, (v z')(t0) = flux0 on [t0, horizon].
pub fn solve_from(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    t0: f64,
    z0: f64,
    flux0: f64,
    horizon: f64,
    opts: &SolverOptions,
) -> Result<SolutionTrack> {
    opts.validate()?;
    check_inputs(v, a, z0, horizon)?;
    if !(t0 > 0.0 && t0 < horizon) {
        return Err(precondition(format!("start {t0} must lie in (0, {horizon})")));
    }
    let checkpoints = checkpoint_grid(t0, horizon, opts);
    let p0 = flux0 * (-v.ln_unchecked(t0, Side::Right)).exp();
    let raw = integrate(v, a, t0, z0, p0, None, horizon, &checkpoints, opts, None)?;
    let track = SolutionTrack::from_raw(raw, v, a, None, z0, flux0);
    finish(track, opts)
}

fn finish(mut track: SolutionTrack, opts: &SolverOptions) -> Result<SolutionTrack> {
    track.zeros = find_zeros(&track, opts.refine_tol, opts.separation_floor)?;
    if opts.verify {
        let r = residual(&track);
        track.diagnostics.residual = Some(r / track.z0);
        if !(r <= opts.residual_tol * track.z0) {
            return Err(Error::SolverAccuracy {
                detail: String::from("integral-equation residual above tolerance"),
                measured: r / track.z0,
                tolerance: opts.residual_tol,
            });
        }
    }
    Ok(track)
}

/// Solve from the origin, growing the horizon by 1.5× until `needed` zeros
/// are captured or `cap` is reached.
pub fn solve_until_zeros(
    v: &CoefficientProfile,
    a: &CoefficientProfile,
    z0: f64,
    needed: usize,
    initial_horizon: f64,
    cap: f64,
    opts: &SolverOptions,
) -> Result<SolutionTrack> {
    let mut h = initial_horizon.min(cap);
    let probe_opts = SolverOptions { verify: false, ..*opts };
    loop {
        check_inputs(v, a, z0, h)?;
        let raw = integrate(
            v,
            a,
            0.0,
            z0,
            0.0,
            Some(opts.eps_floor),
            h,
            &checkpoint_grid(0.0, h, &probe_opts),
            &probe_opts,
            Some(needed),
        )?;
        let track = SolutionTrack::from_raw(raw, v, a, Some(opts.eps_floor), z0, 0.0);
        let zs = find_zeros(&track, opts.refine_tol, opts.separation_floor)?;
        if zs.len() >= needed {
            // Re-solve on a horizon just past the last requested zero.
            let last = zs[needed - 1].location;
            let hz = (last * 1.01).min(h).max(last + 1e-9 * last);
            return solve_ivp(v, a, z0, hz, opts);
        }
        if h >= cap {
            return Err(Error::Horizon {
                horizon: h,
                found: zs.len(),
                needed,
            });
        }
        h = (h * 1.5).min(cap);
    }
}

/// Sign changes of the interpolant refined by bisection to width
/// refine_tol·max(1, t).
pub fn find_zeros(track: &SolutionTrack, refine_tol: f64, separation_floor: f64) -> Result<Vec<Zero>> {
    let mut out: Vec<Zero> = Vec::new();
    let n = track.nodes.len();
    let mut i = 0;
    while i + 1 < n {
        let (a, b) = (&track.nodes[i], &track.nodes[i + 1]);
        let zero = if a.z == 0.0 && i > 0 {
            Some(Zero {
                location: a.t,
                lo: a.t,
                hi: a.t,
            })
        } else if b.z == 0.0 {
            i += 1;
            Some(Zero {
                location: b.t,
                lo: b.t,
                hi: b.t,
            })
        } else if (a.z < 0.0) != (b.z < 0.0) && a.z != 0.0 {
            let (mut lo, mut hi) = (a.t, b.t);
            let neg_lo = a.z < 0.0;
            for _ in 0..200 {
                if hi - lo <= refine_tol * hi.max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let zm = track.evaluate(mid).0;
                if zm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (zm < 0.0) == neg_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(Zero {
                location: 0.5 * (lo + hi),
                lo,
                hi,
            })
        } else {
            None
        };
        if let Some(zr) = zero {
            if let Some(prev) = out.last() {
                let av = track.a.value_unchecked(zr.location, Side::Mid);
                let scale = if av > 0.0 {
                    core::f64::consts::PI / av.sqrt()
                } else {
                    zr.location
                };
                let floor = separation_floor * scale;
                if zr.location - prev.location < floor {
                    return Err(Error::Resolution {
                        first: prev.location,
                        second: zr.location,
                        floor,
                    });
                }
            }
            out.push(zr);
        }
        i += 1;
    }
    Ok(out)
}

/// Max |z(t) − z0 + ∫(1/v)∫ A v z| over the track nodes, with the true v,
/// from Gauss–Legendre quadrature of the Hermite interpolants.
pub fn residual(track: &SolutionTrack) -> f64 {
    let v = &track.v;
    let a = &track.a;
    let n = track.nodes.len();
    // w_s(t) = (initial flux − ∫_start^t A v z) / v(t_i⁺) carried node to node.
    let lv0 = if track.start > 0.0 {
        v.ln_unchecked(track.start, Side::Right)
    } else {
        0.0
    };
    let mut wscaled = if track.start > 0.0 {
        track.initial_flux * (-lv0).exp()
    } else {
        0.0
    };
    let mut outer = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..n - 1 {
        let ta = track.nodes[i].t;
        let tb = track.nodes[i + 1].t;
        let h = tb - ta;
        let la = if ta > 0.0 {
            v.ln_unchecked(ta, Side::Right)
        } else {
            f64::NEG_INFINITY
        };
        let [hh, za, da, zb, db, ..] = track.hermite(i);
        let zf = |s: f64| SolutionTrack::herm(za, da, zb, db, hh, ((s - ta) / hh).clamp(0.0, 1.0));
        // Inner integral ∫_ta^s A e^{L(x) − L(s)} z dx at the outer nodes.
        let mut acc = 0.0;
        for k in 0..5 {
            let s = ta + 0.5 * h * (1.0 + GL5_X[k]);
            let ls = v.ln_unchecked(s, Side::Mid);
            let inner = {
                let c = 0.5 * (s - ta);
                let mut q = 0.0;
                for j in 0..5 {
                    let x = ta + c * (1.0 + GL5_X[j]);
                    q += GL5_W[j] * a.value_unchecked(x, Side::Mid) * (v.ln_unchecked(x, Side::Mid) - ls).exp() * zf(x);
                }
                q * c
            };
            let carried = if ta > 0.0 { wscaled * (la - ls).exp() } else { 0.0 };
            acc += GL5_W[k] * (carried - inner);
        }
        outer += 0.5 * h * acc;
        // Advance the scaled flux to the next node.
        let lb = v.ln_unchecked(tb, Side::Right);
        let mut q = 0.0;
        for j in 0..5 {
            let x = ta + 0.5 * h * (1.0 + GL5_X[j]);
            q += GL5_W[j] * a.value_unchecked(x, Side::Mid) * (v.ln_unchecked(x, Side::Mid) - lb).exp() * zf(x);
        }
        let carried = if ta > 0.0 { wscaled * (la - lb).exp() } else { 0.0 };
        wscaled = carried - 0.5 * h * q;
        let r = (track.nodes[i + 1].z - track.z0 - outer).abs();
        worst = worst.max(r);
    }
    worst
}

/// Fill Riccati values and near-zero flags.
#[allow(clippy::needless_range_loop)]
pub fn riccati_track(track: &SolutionTrack, mask: f64) -> SolutionTrack {
    let mut out = track.clone();
    let n = track.nodes.len();
    let mut ric = Vec::with_capacity(n);
    let mut near = alloc::vec![false; n];
    for i in 0..n {
        let lo = i.saturating_sub(4);
        let hi = (i + 5).min(n);
        let amp = track.nodes[lo..hi].iter().fold(0.0f64, |m, x| m.max(x.z.abs()));
        let node = &track.nodes[i];
        if node.z.abs() <= mask * amp {
            near[i] = true;
            ric.push(None);
        } else {
            let y = -node.p / node.z * node.lv_r.exp();
            ric.push(Some(if node.p == 0.0 { 0.0 } else { y }));
        }
    }
    for zr in &track.zeros {
        let k = track.nodes.partition_point(|x| x.t < zr.lo);
        if k > 0 {
            near[k - 1] = true;
        }
        if k < n {
            near[k] = true;
        }
        let k2 = track.nodes.partition_point(|x| x.t <= zr.hi);
        if k2 < n {
            near[k2] = true;
        }
    }
    out.riccati = ric;
    out.near_zero = near;
    out
}

/// Largest decrease of y between consecutive defined nodes that are not
/// separated by a zero, relative to the local magnitude.
pub fn riccati_monotonicity_violation(track: &SolutionTrack) -> f64 {
    let mut worst: f64 = 0.0;
    let zeros: Vec<f64> = track.zeros.iter().map(|z| z.location).collect();
    let mut prev: Option<(f64, f64)> = None;
    for (i, y) in track.riccati.iter().enumerate() {
        let t = track.nodes[i].t;
        if let Some(y) = *y {
            if let Some((tp, yp)) = prev {
                let crossed = zeros.iter().any(|&z| z > tp && z <= t);
                if !crossed && y.is_finite() && yp.is_finite() {
                    let drop = (yp - y) / (1.0 + yp.abs().max(y.abs()));
                    worst = worst.max(drop);
                }
            }
            prev = Some((t, y));
        }
    }
    worst
}

/// Max over steps of |Δw| / (sup |A v z| · Δt), sampled at eight points per step.
pub fn flux_lipschitz_ratio(track: &SolutionTrack) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..track.nodes.len() - 1 {
        let a = &track.nodes[i];
        let b = &track.nodes[i + 1];
        let h = b.t - a.t;
        let ub = b.p * (b.lv_r - a.lv_r).exp();
        // Differences at roundoff level carry no information.
        let dw = (ub - a.p).abs() - 8.0 * f64::EPSILON * ub.abs().max(a.p.abs());
        if dw <= 0.0 {
            continue;
        }
        let mut sup: f64 = (a.a_r * a.z).abs().max((b.a_l * (b.lv_l - a.lv_r).exp() * b.z).abs());
        for k in 1..8 {
            let s = a.t + h * k as f64 / 8.0;
            let val = track.a.value_unchecked(s, Side::Mid) * (track.lv_at(s) - a.lv_r).exp() * track.z_at(s);
            sup = sup.max(val.abs());
        }
        worst = worst.max(dw / (sup * h));
    }
    worst
}

/// Max over steps of |Δz| / (sup |z'| · Δt).
pub fn continuity_ratio(track: &SolutionTrack) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..track.nodes.len() - 1 {
        let a = &track.nodes[i];
        let b = &track.nodes[i + 1];
        let h = b.t - a.t;
        let dz = (b.z - a.z).abs() - 8.0 * f64::EPSILON * b.z.abs().max(a.z.abs());
        if dz <= 0.0 {
            continue;
        }
        let mut sup: f64 = a.p.abs().max((b.p * (b.lv_r - b.lv_l).exp()).abs());
        for k in 1..8 {
            let (_, d) = track.interpolate(a.t + h * k as f64 / 8.0);
            sup = sup.max(d.abs());
        }
        worst = worst.max(dz / (sup * h));
    }
    worst
}

/// Outcome of a Sturm comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// min of z2 − z1 on [0, first zero of z1).
    pub min_difference: f64,
    pub at: f64,
    pub first_zero: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub residuals: (f64, f64),
    pub stability: (f64, f64),
}

/// Compare z1 (potential A1) with z2 (potential A2 ≤ A1) from the same z0.
pub fn sturm_compare(
    v: &CoefficientProfile,
    a1: &CoefficientProfile,
    a2: &CoefficientProfile,
    z0: f64,
    horizon: f64,
    opts: &SolverOptions,
) -> Result<ComparisonReport> {
    for t in sample_grid(horizon, 1000) {
        let x1 = a1.value_unchecked(t, Side::Mid);
        let x2 = a2.value_unchecked(t, Side::Mid);
        if x1 < x2 - 1e-14 * x2.abs() {
            return Err(precondition(format!(
                "comparison needs A1 ≥ A2; A1({t}) = {x1} < A2({t}) = {x2}"
            )));
        }
    }
    let t1 = solve_ivp_until(v, a1, z0, horizon, opts, Some(1))?;
    let t2 = solve_ivp(v, a2, z0, horizon, opts)?;
    let first = t1.zeros.first().map(|z| z.location);
    let end = first.unwrap_or(horizon);
    let mut min_d = f64::INFINITY;
    let mut at = 0.0;
    for (i, node) in t1.nodes.iter().enumerate() {
        if node.t >= end {
            break;
        }
        let _ = i;
        let d = t2.evaluate(node.t).0 - node.z;
        if d < min_d {
            min_d = d;
            at = node.t;
        }
    }
    for ((t, z2), (_, z1)) in t2.checkpoint_values().into_iter().zip(t1.checkpoint_values()) {
        if t >= end {
            break;
        }
        if z2 - z1 < min_d {
            min_d = z2 - z1;
            at = t;
        }
    }
    let tol = opts.residual_tol * z0;
    Ok(ComparisonReport {
        min_difference: min_d,
        at,
        first_zero: first,
        tolerance: tol,
        passed: min_d >= -tol,
        residuals: (
            t1.diagnostics.residual.unwrap_or(f64::NAN),
            t2.diagnostics.residual.unwrap_or(f64::NAN),
        ),
        stability: (
            t1.diagnostics.stability.unwrap_or(f64::NAN),
            t2.diagnostics.stability.unwrap_or(f64::NAN),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{make_model, ModelKind};

    fn euclid3() -> CoefficientProfile {
        make_model(ModelKind::Euclidean { m: 3 }).unwrap()
    }

    fn capped_euler(h: f64) -> CoefficientProfile {
        CoefficientProfile::power(h * h, -2.0)
            .unwrap()
            .clamped_below(1.0)
            .unwrap()
    }

    #[test]
    fn zero_potential_is_constant() {
        let a = CoefficientProfile::constant(0.0).unwrap();
        let tr = solve_ivp(&euclid3(), &a, 2.0, 50.0, &SolverOptions::default()).unwrap();
        for i in 0..tr.len() {
            assert_eq!(tr.z(i), 2.0);
            assert_eq!(tr.flux(i), 0.0);
        }
        let r = riccati_track(&tr, 1e-10);
        assert!(r.riccati.iter().all(|y| *y == Some(0.0)));
        assert!(tr.zeros.is_empty());
    }

    #[test]
    fn sinc_on_unit_interval() {
        // A = 1 on [0,1] with v = t²: z = sin t / t.
        let tr = solve_ivp(&euclid3(), &capped_euler(1.0), 1.0, 1.0, &SolverOptions::default()).unwrap();
        for i in 1..tr.len() {
            let t = tr.t(i);
            assert!((tr.z(i) - t.sin() / t).abs() < 2e-7, "t={t}");
        }
    }

    #[test]
    fn euler_first_zero_regular_start() {
        // z(1)=1, z'(1)=0 in the uncapped region: first zero exp((2π/3)/ω).
        let a = CoefficientProfile::power(1.0, -2.0).unwrap();
        let tr = solve_from(&euclid3(), &a, 1.0, 1.0, 0.0, 20.0, &SolverOptions::default()).unwrap();
        let w = 3f64.sqrt() / 2.0;
        let expect = ((2.0 * core::f64::consts::PI / 3.0) / w).exp();
        assert!((tr.zeros[0].location - expect).abs() < 1e-7 * expect);
    }

    #[test]
    fn constant_coefficient_spacing() {
        let v = CoefficientProfile::growth(crate::GrowthEnvelope::new(1.0, 1.0, 1.0, 0.0).unwrap());
        let a = CoefficientProfile::constant(1.0).unwrap();
        let tr = solve_from(&v, &a, 1.0, 1.0, 0.0, 60.0, &SolverOptions::default()).unwrap();
        let s = 2.0 * core::f64::consts::PI / 3f64.sqrt();
        for w in tr.zeros.windows(2) {
            let d = w[1].location - w[0].location;
            assert!((d - s).abs() < 1e-8, "spacing {d} vs {s}");
        }
    }

    #[test]
    fn positive_below_threshold() {
        let tr = solve_ivp(&euclid3(), &capped_euler(0.4), 1.0, 100.0, &SolverOptions::default()).unwrap();
        assert!(tr.zeros.is_empty());
        assert!(tr.z_values().iter().all(|&z| z > 0.0));
    }

    #[test]
    fn comparison_identical_and_zero() {
        let o = SolverOptions::default();
        let v = euclid3();
        let same = sturm_compare(&v, &capped_euler(0.6), &capped_euler(0.6), 1.0, 200.0, &o).unwrap();
        assert!(same.min_difference.abs() < 1e-12);
        let zero = CoefficientProfile::constant(0.0).unwrap();
        let r = sturm_compare(&v, &capped_euler(0.7), &zero, 1.0, 200.0, &o).unwrap();
        assert!(r.passed);
        assert!(sturm_compare(&v, &zero, &capped_euler(0.7), 1.0, 50.0, &o).is_err());
    }

    #[test]
    fn refuses_bad_inputs() {
        let o = SolverOptions::default();
        assert!(solve_ivp(&euclid3(), &capped_euler(1.0), -1.0, 10.0, &o).is_err());
        let a = CoefficientProfile::power(1.0, 1.0).unwrap();
        let vanishing = CoefficientProfile::table(&[(0.0, 1.0), (5.0, 0.0), (10.0, 1.0)], &[]).unwrap();
        assert!(solve_ivp(&vanishing, &a, 1.0, 10.0, &o).is_err());
        let short = CoefficientProfile::constant(1.0).unwrap().truncated(5.0).unwrap();
        assert!(solve_ivp(&short, &a, 1.0, 10.0, &o).is_err());
    }
}
