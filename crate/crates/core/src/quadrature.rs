//! Adaptive Gauss–Kronrod quadrature with breakpoint splitting and
//! chunked semi-infinite tails.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float as _;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Five-point Gauss–Legendre nodes on [-1, 1].
pub const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
/// Five-point Gauss–Legendre weights on [-1, 1].
pub const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Fixed five-point Gauss–Legendre rule on [a, b].
pub fn gauss_legendre5<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..5 {
        s += GL5_W[k] * f(c + h * GL5_X[k]);
    }
    s * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Width of a geometric sub-split on wide positive ranges.
    pub geometric_ratio: f64,
    /// Semi-infinite tails stop once a chunk falls below this fraction of the sum.
    pub tail_rel: f64,
    pub max_chunks: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_intervals: 2000,
            geometric_ratio: 4.0,
            tail_rel: 1e-10,
            max_chunks: 80,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut abs_k = rk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = rk * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = rk * h;
    let asc = asc * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (1.0f64).min((200.0 * err / asc).powf(1.5));
    }
    let round = 50.0 * f64::EPSILON * abs_k * h.abs();
    if round > err {
        err = round;
    }
    (value, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7K15 integration over the sub-intervals delimited by
/// `points` (sorted, at least two entries). Returns an error if the
/// tolerance is not met within the interval budget.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], opts: &QuadOptions) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&mut f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if !total.is_finite() {
        return Err(Error::Quadrature {
            a: lo,
            b: hi,
            error: f64::INFINITY,
        });
    }
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                a: lo,
                b: hi,
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Interval exhausted at machine precision; keep its estimate.
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let mut value = 0.0;
    let mut error = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
    }
    Ok(Estimate { value, error })
}

/// Build a split list for [a, b] from the given interior breakpoints,
/// adding geometric cuts when the range spans many scales.
pub fn split_points(a: f64, b: f64, interior: &[f64], ratio: f64) -> Vec<f64> {
    let mut pts = Vec::with_capacity(interior.len() + 4);
    pts.push(a);
    for &p in interior {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.push(b);
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup();
    if a > 0.0 && ratio > 1.0 {
        let mut out = Vec::with_capacity(pts.len());
        for w in pts.windows(2) {
            out.push(w[0]);
            let mut x = w[0] * ratio;
            while x < w[1] / ratio.sqrt() {
                out.push(x);
                x *= ratio;
            }
        }
        out.push(b);
        pts = out;
    }
    pts
}

/// Integrate over [a, b] splitting at the interior breakpoints.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], opts: &QuadOptions) -> Result<Estimate> {
    if b == a {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let pts = split_points(a, b, breaks, opts.geometric_ratio);
    integrate_pieces(f, &pts, opts)
}

/// Integrate a nonnegative integrand over [a, ∞) by doubling chunks.
///
/// Returns `value = +∞` when the chunks fail to become negligible within
/// `max_chunks` doublings. `h0` is the first chunk width.
pub fn integrate_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    h0: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<Estimate> {
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut lo = a;
    let mut h = h0;
    let mut small = 0;
    for _ in 0..opts.max_chunks {
        let hi = lo + h;
        let est = match integrate(&mut f, lo, hi, breaks, opts) {
            // Overflow of a nonnegative integrand.
            Err(Error::Quadrature { error, .. }) if error.is_infinite() => break,
            r => r?,
        };
        sum += est.value;
        err += est.error;
        if est.value.abs() <= opts.tail_rel * sum.abs() || (est.value == 0.0 && sum == 0.0) {
            small += 1;
            if small >= 2 {
                return Ok(Estimate { value: sum, error: err });
            }
        } else {
            small = 0;
        }
        lo = hi;
        h *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Ok(Estimate {
        value: f64::INFINITY,
        error: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let e = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, &[], &QuadOptions::default()).unwrap();
        assert!((e.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn step_function_split_at_break() {
        let f = |x: f64| if x < 1.0 { 2.0 } else { 1.0 };
        let e = integrate(f, 0.0, 3.0, &[1.0], &QuadOptions::default()).unwrap();
        assert!((e.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn wide_range_reciprocal() {
        let e = integrate(|x| 1.0 / x, 1e-6, 1e6, &[], &QuadOptions::default()).unwrap();
        assert!((e.value - 12.0 * core::f64::consts::LN_10).abs() < 1e-8);
    }

    #[test]
    fn tails() {
        let opts = QuadOptions::default();
        let e = integrate_tail(|x| (-x).exp(), 1.0, 1.0, &[], &opts).unwrap();
        assert!((e.value - (-1.0f64).exp()).abs() < 1e-12);
        let p = integrate_tail(|x| 1.0 / (x * x), 2.0, 1.0, &[], &opts).unwrap();
        assert!((p.value - 0.5).abs() < 1e-8);
        let d = integrate_tail(|x| 1.0 / x, 1.0, 1.0, &[], &opts).unwrap();
        assert!(d.value.is_infinite());
    }

    #[test]
    fn gl5_degree_nine() {
        let v = gauss_legendre5(|x| x.powi(9) + x.powi(8), -1.0, 2.0);
        let exact = (2.0f64.powi(10) - 1.0) / 10.0 + (2.0f64.powi(9) + 1.0) / 9.0;
        assert!((v - exact).abs() < 1e-10);
    }
}
