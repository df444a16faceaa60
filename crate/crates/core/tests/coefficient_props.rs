use oscilla_core::coefficients::sample_grid;
use oscilla_core::{envelope_log_derivative, make_model, CoefficientProfile, GrowthEnvelope, ModelKind, Side};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn model() -> impl Strategy<Value = ModelKind> {
    prop_oneof![
        (2u32..7).prop_map(|m| ModelKind::Euclidean { m }),
        (2u32..7, 0.1f64..3.0).prop_map(|(m, b)| ModelKind::Hyperbolic { m, b }),
        (2u32..7, 0.1f64..3.0, 1.0f64..2.5, 0.0f64..2.0).prop_map(|(m, a, alpha, beta)| ModelKind::SuperExp {
            m,
            a,
            alpha,
            beta
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_profiles_are_positive(kind in model(), t1 in 1e-3f64..5.0, len in 0.1f64..20.0) {
        let v = make_model(kind).unwrap();
        let t2 = t1 + len;
        let mut max_recip: f64 = 0.0;
        for k in 0..=500 {
            let t = t1 + (t2 - t1) * k as f64 / 500.0;
            let x = v.eval(t).unwrap();
            prop_assert!(x > 0.0);
            max_recip = max_recip.max(1.0 / x);
        }
        prop_assert!(max_recip.is_finite());
    }

    #[test]
    fn superexp_is_nondecreasing(m in 2u32..7, a in 0.05f64..3.0, alpha in 1.0f64..3.0, beta in 0.0f64..2.0) {
        let v = make_model(ModelKind::SuperExp { m, a, alpha, beta }).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for t in sample_grid(6.0, 2000) {
            let l = v.ln_eval(t, Side::Mid).unwrap();
            prop_assert!(l >= prev, "decrease at t = {}", t);
            prev = l;
        }
    }

    #[test]
    fn jump_midpoint_is_stored(at in 0.5f64..10.0, ratio in 0.05f64..1.0) {
        let v = make_model(ModelKind::Euclidean { m: 3 }).unwrap().with_jump(at, ratio).unwrap();
        let j = v.jumps()[0];
        prop_assert_eq!(v.eval(at).unwrap(), j.mid);
        prop_assert_eq!(j.mid, 0.5 * (j.left + j.right));
    }

    #[test]
    fn table_jump_midpoint(at in 1.5f64..8.5, drop in 0.0f64..0.9) {
        let left = 2.0;
        let right = left * (1.0 - drop);
        let t = CoefficientProfile::table(&[(0.0, 0.0), (1.0, 1.0), (9.0, 3.0), (10.0, 4.0)], &[(at, left, right)]).unwrap();
        prop_assert_eq!(t.eval(at).unwrap(), 0.5 * (left + right));
    }
}

#[test]
fn log_derivative_matches_finite_differences() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let envs = [
        (1.0, 1.0, 1.0, 0.0),
        (2.0, 0.5, 2.0, 0.0),
        (1.0, 1.0, 1.5, 1.0),
        (3.0, 0.2, 0.5, 2.0),
    ];
    for (s, a, al, b) in envs {
        let env = GrowthEnvelope::new(s, a, al, b).unwrap();
        for _ in 0..100 {
            let t = (2.0f64..50.0).new_tree(&mut runner).unwrap().current();
            let h = 1e-4 * t;
            let fd = (env.ln_value(t + h).unwrap() - env.ln_value(t - h).unwrap()) / (2.0 * h);
            let d = envelope_log_derivative(&env, t).unwrap();
            assert!((d - fd).abs() <= 1e-6 * d.abs(), "t = {t}: {d} vs {fd}");
        }
    }
}
