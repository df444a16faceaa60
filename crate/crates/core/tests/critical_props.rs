use oscilla_core::critical::{self, CriticalCurve};
use oscilla_core::quadrature::{integrate, QuadOptions};
use oscilla_core::{make_model, CoefficientProfile, GrowthEnvelope, ModelKind};
use proptest::prelude::*;

fn profiles() -> Vec<CoefficientProfile> {
    vec![
        make_model(ModelKind::Euclidean { m: 3 }).unwrap(),
        make_model(ModelKind::Euclidean { m: 5 }).unwrap(),
        make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 }).unwrap(),
        make_model(ModelKind::Hyperbolic { m: 4, b: 0.5 }).unwrap(),
        make_model(ModelKind::SuperExp {
            m: 3,
            a: 1.0,
            alpha: 1.0,
            beta: 0.0,
        })
        .unwrap(),
        make_model(ModelKind::SuperExp {
            m: 3,
            a: 0.5,
            alpha: 1.5,
            beta: 1.0,
        })
        .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chi_f_dominates_chi(a in 0.2f64..2.0, alpha in 1.0f64..2.0, t in 2.5f64..30.0) {
        let v = make_model(ModelKind::SuperExp { m: 3, a, alpha, beta: 0.0 }).unwrap();
        let env = GrowthEnvelope::new(1.0, a, alpha, 0.0).unwrap();
        let c = critical::chi(&v, t, f64::INFINITY).unwrap();
        let cf = critical::chi_f(&env, t).unwrap();
        prop_assert!(cf >= c * (1.0 - 1e-9), "{} < {}", cf, c);
    }

    #[test]
    fn tail_identity(idx in 0usize..6, lo in 0.05f64..5.0, span in 1.1f64..50.0) {
        let v = &profiles()[idx];
        let (t0, t1) = (lo, lo * span);
        let q = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-11, ..QuadOptions::default() };
        let lhs = integrate(|s| critical::chi(v, s, f64::INFINITY).unwrap().sqrt(), t0, t1, &v.breakpoints(t0, t1), &q).unwrap().value;
        let rhs = 0.5 * (critical::ln_tail_integral(v, t0, f64::INFINITY).unwrap()
            - critical::ln_tail_integral(v, t1, f64::INFINITY).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-7 * rhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }
}

#[test]
fn sqrt_chi_not_integrable() {
    for v in profiles() {
        let curve = CriticalCurve::for_profile(&v, f64::INFINITY, 1.0, 1e6, 16).unwrap();
        let q = QuadOptions::default();
        let mut acc = 0.0;
        let mut t = 1.0;
        let mut increments = Vec::new();
        while t < 1e5 {
            let d = curve.integral_sqrt(t, 10.0 * t, &q).unwrap();
            assert!(d > 0.0);
            acc += d;
            increments.push(d);
            t *= 10.0;
        }
        // Each decade contributes at least as much as a fixed positive amount.
        let floor = increments.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(floor > 0.5, "{floor}");
        assert!(acc > 2.5);
    }
}
