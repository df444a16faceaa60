use oscilla_core::criteria::{self, Branch, CriteriaOptions, Verdict};
use oscilla_core::gaps::{gap_bound, gap_sweep, GapOptions};
use oscilla_core::spectral::{fd_eigenvalue_oracle, model_lower_bound, principale_constant};
use oscilla_core::volterra::{solve_ivp, SolverOptions};
use oscilla_core::{make_model, CoefficientProfile, GrowthEnvelope, ModelKind};
use proptest::prelude::*;

fn capped(h: f64) -> CoefficientProfile {
    CoefficientProfile::power(h * h, -2.0)
        .unwrap()
        .clamped_below(1.0)
        .unwrap()
}

#[test]
fn gap_bound_decreases_in_c_and_alpha() {
    let cs: Vec<f64> = (1..60).map(|k| 1.0 + 0.1 * k as f64).collect();
    let alphas: Vec<f64> = (1..40).map(|k| 0.1 * k as f64).collect();
    for &a in &alphas {
        for w in cs.windows(2) {
            assert!(gap_bound(w[1], a).unwrap() < gap_bound(w[0], a).unwrap());
        }
    }
    for &c in &cs {
        for w in alphas.windows(2) {
            assert!(gap_bound(c, w[1]).unwrap() < gap_bound(c, w[0]).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gap_lengths_partition(tau in 1.0f64..40.0, h in 0.55f64..1.5) {
        let v = make_model(ModelKind::Hyperbolic { m: 2, b: 1.0 }).unwrap();
        let a = CoefficientProfile::coth(h * h, 1.0).unwrap().clamped_below(1.0).unwrap();
        let (_, recs) = gap_sweep(&v, &a, &[tau], &GapOptions::default()).unwrap();
        let r = &recs[0];
        prop_assert!(r.tau <= r.t1 && r.t1 < r.t2);
        prop_assert!((r.length_sum() - (r.t2 - r.tau)).abs() <= 1e-9 * r.t2);
        prop_assert!(r.lengths.iter().all(|g| *g >= 0.0));
        prop_assert!(r.y_around_t1.0 > 1.0 && r.y_around_t1.1 < -1.0);
    }

    #[test]
    fn localization_is_consistent(h in 0.8f64..2.5, t in 5.0f64..200.0) {
        let v = make_model(ModelKind::Euclidean { m: 3 }).unwrap();
        let a = capped(h);
        let rep = criteria::first_zero_scan(&v, &a, t, 12, &CriteriaOptions::default()).unwrap();
        if rep.verdict == Verdict::Holds {
            let rb = rep.params.r_bar.unwrap();
            let tr = solve_ivp(&v, &a, 1.0, rb * 1.001, &SolverOptions::default()).unwrap();
            prop_assert!(!tr.zeros.is_empty() && tr.zeros[0].location <= rb * 1.001);
        }
    }

    #[test]
    fn branch_matches_integrability(m in 2u32..6, h in 0.1f64..2.0) {
        let v = make_model(ModelKind::Euclidean { m }).unwrap();
        let rep = criteria::oscillation_test(&v, &capped(h), 1e3, &CriteriaOptions::default()).unwrap();
        let expect = if m == 2 { Branch::ReciprocalNotIntegrable } else { Branch::ReciprocalIntegrable };
        prop_assert_eq!(rep.branch, expect);
    }

    #[test]
    fn richardson_ratio_near_four(scale in 0.2f64..2.0, lo in 1.0f64..10.0, len in 2.0f64..30.0) {
        let v = CoefficientProfile::growth(GrowthEnvelope::new(1.0, scale, 1.0, 0.0).unwrap());
        let r = fd_eigenvalue_oracle(&v, lo, lo + len, 128).unwrap();
        prop_assert!((r.ratio - 4.0).abs() <= 0.8, "{}", r.ratio);
    }

    #[test]
    fn superexp_sandwich(r in 4.0f64..12.0) {
        let v = make_model(ModelKind::SuperExp { m: 3, a: 1.0, alpha: 2.0, beta: 0.0 }).unwrap();
        let low = model_lower_bound(1.0, 2.0, r, 3).unwrap().model_lower_bound.unwrap();
        let fd = fd_eigenvalue_oracle(&v, r, r + 5.0, 512).unwrap().value;
        let top = principale_constant(1.0, 2.0, 0.0).unwrap().value * r * r;
        prop_assert!(low <= fd && fd <= top * 1.05, "{} {} {}", low, fd, top);
    }
}
