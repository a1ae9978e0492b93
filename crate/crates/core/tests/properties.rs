//! Property-based invariants over the parameter families of the catalog.

use std::collections::BTreeMap;

use acm_core::catalog;
use acm_core::curvature::curvature_sample;
use acm_core::decomp::{fit, BasisTag, Coefficients, FitSample, DIVIDED};
use acm_core::deform::{apply, DeformationParams};
use acm_core::geometry::Point;
use acm_core::kmn::analyze_point;
use proptest::prelude::*;

fn model(name: &str, kv: &[(&str, f64)]) -> catalog::Model {
    let p: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog::build(name, &p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cosymplectic_kmn_matches_brackets(b in -2.0f64..2.0, c in -2.0f64..2.0) {
        prop_assume!((b + c).abs() > 0.1);
        let m = model("cosym5", &[("b", b), ("c", c)]);
        let pa = analyze_point(&m.structure, 0.0, &Point::identity(), None, 1).unwrap();
        let lambda = 0.5 * (b + c);
        let want = [-lambda * lambda, c - b, 0.0];
        for (g, w) in pa.kmn.triple().iter().zip(want) {
            prop_assert!((g - w).abs() < 1e-9, "{:?} vs {want:?}", pa.kmn.triple());
        }
        prop_assert!((pa.kmn.lambda - lambda.abs()).abs() < 1e-9);
    }

    #[test]
    fn kenmotsu_kmn_matches_family(lambda in 0.05f64..3.0) {
        let m = model("kenmotsu5", &[("lambda", lambda)]);
        let pa = analyze_point(&m.structure, 1.0, &Point::identity(), None, 1).unwrap();
        let want = [-1.0 - lambda * lambda, 0.0, 2.0];
        for (g, w) in pa.kmn.triple().iter().zip(want) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn riemann_symmetries_hold(b in -2.0f64..2.0, c in -2.0f64..2.0, seed in 0u64..100) {
        let m = model("cosym_solvable", &[("n", 1.0), ("b", b), ("c", c)]);
        let p = &m.sample_points(2, seed)[1];
        let s = curvature_sample(&m.structure, p, seed).unwrap();
        prop_assert!(s.symmetry_residuals().max() < 1e-6);
    }

    #[test]
    fn fit_recovers_synthetic_combinations(
        coeffs in proptest::collection::vec(-3.0f64..3.0, 9),
        lambda in 0.2f64..2.0,
    ) {
        // a kenmotsu5 frame supplies h != 0; the target is any combination of the basis
        let m = model("kenmotsu5", &[("lambda", lambda)]);
        let pa = analyze_point(&m.structure, 1.0, &Point::identity(), None, 1).unwrap();
        let sample = FitSample::from_analysis(&pa);
        let want = Coefficients::new(DIVIDED.to_vec(), coeffs.clone());
        let target = sample.basis.combine(&want);
        let synthetic = FitSample { riemann: target, ..sample };
        let f = fit(&[synthetic], &DIVIDED).unwrap();
        prop_assert_eq!(f.certificate().rank, 9);
        prop_assert!(f.residual < 1e-10, "{:e}", f.residual);
        for (g, w) in f.coeffs.values.iter().zip(&coeffs) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn kmn_read_off_from_writing(b in 0.2f64..2.0, c in 0.2f64..2.0) {
        // (kappa, mu, nu) = (f1 - f3, f4 - f6, f7 - f8) on a cosymplectic writing
        let m = model("cosym5", &[("b", b), ("c", c)]);
        let pa = analyze_point(&m.structure, 0.0, &Point::identity(), None, 1).unwrap();
        let f = fit(&[FitSample::from_analysis(&pa)], &DIVIDED).unwrap();
        for (g, w) in f.coeffs.kmn().iter().zip(pa.kmn.triple()) {
            prop_assert!((g - w).abs() < 1e-9);
        }
        prop_assert!(f.coeffs.value(BasisTag::R3) > 0.0);
    }

    #[test]
    fn deformations_compose(b1 in 0.3f64..3.0, b2 in 0.3f64..3.0) {
        let m = model("cosym5", &[("b", 0.0), ("c", 2.0)]);
        let s = &m.structure;
        let twice = apply(&apply(s, &DeformationParams::constant(1.0, b1), &[]).unwrap(),
            &DeformationParams::constant(1.0, b2), &[]).unwrap();
        let once = apply(s, &DeformationParams::constant(1.0, b1 * b2), &[]).unwrap();
        let p = Point::identity();
        prop_assert!((twice.metric().eval(&p).unwrap() - once.metric().eval(&p).unwrap()).amax() < 1e-8);
        prop_assert!((twice.xi().eval(&p).unwrap() - once.xi().eval(&p).unwrap()).amax() < 1e-8);
        prop_assert!((twice.eta().eval(&p).unwrap() - once.eta().eval(&p).unwrap()).amax() < 1e-8);
        prop_assert!((twice.phi().eval(&p).unwrap() - once.phi().eval(&p).unwrap()).amax() < 1e-8);
    }

    #[test]
    fn chart_deformations_compose(b1 in 0.3f64..3.0, b2 in 0.3f64..3.0, seed in 0u64..50) {
        let m = model("cosym_solvable", &[]);
        let s = &m.structure;
        let twice = apply(&apply(s, &DeformationParams::constant(1.0, b1), &[]).unwrap(),
            &DeformationParams::constant(1.0, b2), &[]).unwrap();
        let once = apply(s, &DeformationParams::constant(1.0, b1 * b2), &[]).unwrap();
        for p in m.sample_points(3, seed) {
            prop_assert!((twice.metric().eval(&p).unwrap() - once.metric().eval(&p).unwrap()).amax() < 1e-8);
            prop_assert!((twice.xi().eval(&p).unwrap() - once.xi().eval(&p).unwrap()).amax() < 1e-8);
        }
    }
}
