use oscilla_core::volterra::{
    continuity_ratio, flux_lipschitz_ratio, riccati_monotonicity_violation, riccati_track, solve_ivp, sturm_compare,
    SolverOptions,
};
use oscilla_core::{make_model, CoefficientProfile, ModelKind};
use proptest::prelude::*;

fn capped(h: f64) -> CoefficientProfile {
    CoefficientProfile::power(h * h, -2.0)
        .unwrap()
        .clamped_below(1.0)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_halving_moves_zeros_little(h in 0.8f64..1.6) {
        let v = make_model(ModelKind::Euclidean { m: 3 }).unwrap();
        let o = SolverOptions::default();
        let fine = SolverOptions { max_phase_step: o.max_phase_step / 2.0, max_log_v_step: o.max_log_v_step / 2.0, ..o };
        let a = capped(h);
        let t1 = solve_ivp(&v, &a, 1.0, 2000.0, &o).unwrap();
        let t2 = solve_ivp(&v, &a, 1.0, 2000.0, &fine).unwrap();
        prop_assert_eq!(t1.zeros.len(), t2.zeros.len());
        for (x, y) in t1.zeros.iter().zip(&t2.zeros) {
            let tol = 4.0 * o.refine_tol * x.location.max(1.0);
            prop_assert!((x.location - y.location).abs() <= tol, "{} vs {}", x.location, y.location);
        }
    }

    #[test]
    fn riccati_is_monotone_between_zeros(m in 2u32..6, b in 0.3f64..2.0, h in 0.2f64..3.0) {
        let v = make_model(ModelKind::Hyperbolic { m, b }).unwrap();
        let a = CoefficientProfile::coth(h, b).unwrap().clamped_below(1.0).unwrap();
        let tr = riccati_track(&solve_ivp(&v, &a, 1.0, 60.0, &SolverOptions::default()).unwrap(), 1e-10);
        prop_assert!(riccati_monotonicity_violation(&tr) <= 1e-9);
        prop_assert!(tr.diagnostics.residual.unwrap() <= 1e-6);
        prop_assert!(tr.diagnostics.stability.unwrap() <= 1e-6);
    }

    #[test]
    fn jumps_keep_z_continuous(at in 1.0f64..20.0, ratio in 0.2f64..0.95, h in 0.5f64..2.0) {
        let v = make_model(ModelKind::Euclidean { m: 3 }).unwrap().with_jump(at, ratio).unwrap();
        let tr = solve_ivp(&v, &capped(h), 1.0, 40.0, &SolverOptions::default()).unwrap();
        prop_assert!(tr.grid().contains(&at));
        prop_assert!(continuity_ratio(&tr) <= 1.05);
        prop_assert!(flux_lipschitz_ratio(&tr) <= 1.05);
    }

    #[test]
    fn sturm_ordering(m in 3u32..6, h2 in 0.1f64..1.5, extra in 0.05f64..1.0) {
        let v = make_model(ModelKind::Euclidean { m }).unwrap();
        let r = sturm_compare(&v, &capped(h2 + extra), &capped(h2), 1.0, 500.0, &SolverOptions::default()).unwrap();
        prop_assert!(r.passed, "min difference {}", r.min_difference);
    }
}
