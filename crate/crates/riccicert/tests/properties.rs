//! Property tests for the library invariants that quantify over inputs:
//! convex-combination linearity, derivative consistency, falsification
//! soundness, lens-space symmetry invariance, and path positivity re-checks.

use proptest::prelude::*;
use riccicert::certify::{certify_positive, Mode, Rectangle, Verdict};
use riccicert::curvature::ricci_doubly_warped;
use riccicert::fixtures::s5_paths_fixture;
use riccicert::isotopy::{certify_path, check_closed_sphere, stage_one_path};
use riccicert::profiles::{
    convex_combine, poly_from_conditions, validate_closure, ClosureSpec, WarpProfile, TAU_JOIN,
};
use riccicert::rational::Rational;
use riccicert::topo::{lens_admissible, LensSpace};

fn hermite_profile(v0: f64, d0: f64, v1: f64, d1: f64) -> WarpProfile {
    let piece = poly_from_conditions(
        0.0,
        &[(0.0, 0, v0), (0.0, 1, d0), (1.0, 0, v1), (1.0, 1, d1)],
    );
    WarpProfile::piecewise(vec![0.0, 1.0], vec![piece], TAU_JOIN).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convex_combination_is_linear_pointwise(
        v0 in 0.2f64..2.0, d0 in -1.0f64..1.0, v1 in 0.2f64..2.0, d1 in -1.0f64..1.0,
        w0 in 0.2f64..2.0, e0 in -1.0f64..1.0, w1 in 0.2f64..2.0, e1 in -1.0f64..1.0,
        lambda in 0.0f64..1.0, r in 0.0f64..1.0,
    ) {
        let p0 = hermite_profile(v0, d0, v1, d1);
        let p1 = hermite_profile(w0, e0, w1, e1);
        let c = convex_combine(&p0, &p1, lambda).unwrap();
        let want = (1.0 - lambda) * p0.value(r) + lambda * p1.value(r);
        prop_assert!((c.value(r) - want).abs() <= 1e-12);
        // exact in rational mode
        let rr = Rational::from_f64_exact(r);
        let la = Rational::from_f64_exact(lambda);
        let lhs = c.eval_exact(&rr, 0).unwrap();
        let rhs = &(&(&Rational::one() - &la) * &p0.eval_exact(&rr, 0).unwrap())
            + &(&la * &p1.eval_exact(&rr, 0).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivatives_match_central_differences(
        v0 in 0.2f64..2.0, d0 in -1.0f64..1.0, v1 in 0.2f64..2.0, d1 in -1.0f64..1.0,
        r in 0.1f64..0.9,
    ) {
        let p = hermite_profile(v0, d0, v1, d1);
        let h = 1e-5;
        let fd1 = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
        let fd2 = (p.value(r + h) - 2.0 * p.value(r) + p.value(r - h)) / (h * h);
        prop_assert!((p.d1(r) - fd1).abs() < 1e-7);
        prop_assert!((p.d2(r) - fd2).abs() < 1e-3);
    }

    #[test]
    fn falsified_witnesses_re_evaluate_nonpositive(
        slope in 0.5f64..4.0,
        root in 0.1f64..0.9,
    ) {
        let field = move |x: &[f64]| slope * (x[0] - root);
        let cert = certify_positive(
            &field,
            &Rectangle::new(vec![0.0], vec![1.0]),
            &[173],
            Mode::Certified,
            Some(slope),
            "slanted line",
        ).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Falsified);
        let witness = cert.witness.unwrap();
        prop_assert!(field(&witness) <= 0.0);
    }

    #[test]
    fn lens_admissibility_invariant_under_symmetries(
        q in proptest::collection::vec(1i64..11, 4),
        unit in 1i64..11,
        seed in 0u64..1000,
    ) {
        let m = 11u64;
        let lens = LensSpace::new(m, q.clone()).unwrap();
        let verdict = lens_admissible(&lens).unwrap();
        // reorder deterministically from the seed
        let mut shuffled = q.clone();
        shuffled.rotate_left((seed % 4) as usize);
        prop_assert_eq!(
            lens_admissible(&LensSpace::new(m, shuffled).unwrap()).unwrap(),
            verdict
        );
        // negate a subset
        let negated: Vec<i64> = q.iter().enumerate()
            .map(|(i, &x)| if (seed >> i) & 1 == 1 { -x } else { x })
            .collect();
        prop_assert_eq!(
            lens_admissible(&LensSpace::new(m, negated).unwrap()).unwrap(),
            verdict
        );
        // simultaneous unit scaling
        let scaled: Vec<i64> = q.iter().map(|&x| (x * unit).rem_euclid(m as i64)).collect();
        prop_assert_eq!(
            lens_admissible(&LensSpace::new(m, scaled).unwrap()).unwrap(),
            verdict
        );
    }
}

/// A Verified path certificate means every grid node of every intermediate
/// metric really has positive components, and every intermediate metric still
/// closes as a sphere.
#[test]
fn verified_path_re_checks_at_grid_nodes() {
    let g = s5_paths_fixture();
    let path = stage_one_path(&g).unwrap();
    let cert = certify_path(&path, (512, 64), Mode::Certified).unwrap();
    assert_eq!(cert.overall, Verdict::Verified);
    let (r_lo, r_hi) = path.guarded_interval();
    for i in 0..=16 {
        let r = r_lo + (r_hi - r_lo) * i as f64 / 16.0;
        for j in 0..=8 {
            let lambda = j as f64 / 8.0;
            for v in path.components_at(r, lambda) {
                assert!(v > 0.0, "component at (r={r}, λ={lambda}) must re-check positive");
            }
        }
    }
    for j in 0..=4 {
        let lambda = j as f64 / 4.0;
        let metric = path.metric_at(lambda).unwrap();
        check_closed_sphere(&metric, 1e-6).unwrap();
        let mid = 0.5 * (r_lo + r_hi);
        let ric = ricci_doubly_warped(&metric, mid).unwrap();
        assert!(ric.ric_rr > 0.0 && ric.ric_hh > 0.0 && ric.ric_ff > 0.0);
    }
}

/// Closure reports never throw; failures are listed with residuals.
#[test]
fn closure_reports_not_thrown() {
    let p = hermite_profile(1.0, 0.5, 0.2, -0.3);
    for spec in [
        ClosureSpec::collapse_at_left((0.0, 1.0)),
        ClosureSpec::collapse_at_right((0.0, 1.0)),
        ClosureSpec::positive_everywhere((0.0, 1.0)),
    ] {
        let report = validate_closure(&p, &spec, 1e-9);
        for check in &report.checks {
            assert!(check.residual.is_finite());
        }
    }
}
