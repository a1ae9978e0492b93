//! Engine output against independently coded closed forms.

use std::collections::BTreeMap;

use acm_core::catalog;
use acm_core::curvature::curvature_sample;
use acm_core::decomp::{fit, predict_closed_form, Dim3Form, FitSample, PredictInput, DIVIDED};
use acm_core::geometry::Point;
use acm_core::kmn::analyze_point;
use acm_core::structure::{ClassifyOptions, StructureTag};

fn model(name: &str, kv: &[(&str, f64)]) -> catalog::Model {
    let p: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog::build(name, &p).unwrap()
}

/// Curvature of a left-invariant orthonormal frame from its brackets,
/// `out[i][j][k][l]` = l-th component of `R(e_i, e_j) e_k`.
fn lie_curvature_oracle(c: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<Vec<f64>>>> {
    let m = c.len();
    // nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k
    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                gamma[i][j][k] = 0.5 * (c[i][j][k] - c[j][k][i] + c[k][i][j]);
            }
        }
    }
    let mut r = vec![vec![vec![vec![0.0; m]; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut v = 0.0;
                    for q in 0..m {
                        v += gamma[j][k][q] * gamma[i][q][l] - gamma[i][k][q] * gamma[j][q][l]
                            - c[i][j][q] * gamma[q][k][l];
                    }
                    r[i][j][k][l] = v;
                }
            }
        }
    }
    r
}

fn cosym_brackets(n: usize, b: f64, c: f64) -> Vec<Vec<Vec<f64>>> {
    let m = 2 * n + 1;
    let mut k = vec![vec![vec![0.0; m]; m]; m];
    for i in 0..n {
        let (e1, e2) = (1 + 2 * i, 2 + 2 * i);
        k[0][e1][e2] = b;
        k[e1][0][e2] = -b;
        k[0][e2][e1] = c;
        k[e2][0][e1] = -c;
    }
    k
}

fn kenmotsu_brackets(n: usize, lambda: f64) -> Vec<Vec<Vec<f64>>> {
    let m = 2 * n + 1;
    let mut k = vec![vec![vec![0.0; m]; m]; m];
    for i in 0..n {
        let (x, y) = (1 + i, 1 + n + i);
        k[0][x][x] = -(1.0 + lambda);
        k[x][0][x] = 1.0 + lambda;
        k[0][y][y] = -(1.0 - lambda);
        k[y][0][y] = 1.0 - lambda;
    }
    k
}

fn assert_matches_oracle(m: &catalog::Model, brackets: &[Vec<Vec<f64>>]) {
    let oracle = lie_curvature_oracle(brackets);
    let sample = curvature_sample(&m.structure, &Point::identity(), 1).unwrap();
    let dim = brackets.len();
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    worst = worst.max((sample.riemann.get(i, j, k, l) - oracle[i][j][k][l]).abs());
                }
            }
        }
    }
    assert!(worst < 1e-12, "{}: {worst:e}", m.name);
}

#[test]
fn lie_curvature_matches_bracket_oracle() {
    for (b, c) in [(0.0, 2.0), (1.0, 3.0), (-0.5, 1.5)] {
        assert_matches_oracle(&model("cosym3", &[("b", b), ("c", c)]), &cosym_brackets(1, b, c));
        assert_matches_oracle(&model("cosym5", &[("b", b), ("c", c)]), &cosym_brackets(2, b, c));
    }
    for lambda in [0.5, 1.0, 2.0] {
        let kv = [("lambda", lambda)];
        assert_matches_oracle(&model("kenmotsu3", &kv), &kenmotsu_brackets(1, lambda));
        assert_matches_oracle(&model("kenmotsu5", &kv), &kenmotsu_brackets(2, lambda));
    }
}

#[test]
fn warped_product_is_hyperbolic() {
    // R(X,Y)Z = -(g(Y,Z) X - g(X,Z) Y) on an orthonormal frame
    let m = model("kenmotsu_warped", &[("n", 2.0), ("c", 0.7)]);
    for p in m.sample_points(3, 9) {
        let s = curvature_sample(&m.structure, &p, 1).unwrap();
        let dim = 5;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let want = -(d(j, k) * d(i, l) - d(i, k) * d(j, l));
                        worst = worst.max((s.riemann.get(i, j, k, l) - want).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-6, "{worst:e}");
        assert!((s.tau + 20.0).abs() < 1e-5);
    }
}

#[test]
fn xi_sectional_curvature_is_kappa() {
    // g(R(xi, X) xi, X) = -kappa - mu g(hX, X) for unit X orthogonal to xi,
    // with h e1 = lambda e1, h e2 = -lambda e2 on each pair
    let (b, c) = (1.0, 3.0);
    let m = model("cosym5", &[("b", b), ("c", c)]);
    let s = curvature_sample(&m.structure, &Point::identity(), 1).unwrap();
    let lambda = 0.5 * (b + c);
    let (kappa, mu) = (-lambda * lambda, c - b);
    for x in 1..5 {
        let h_xx = if x % 2 == 1 { lambda } else { -lambda };
        let want = -kappa - mu * h_xx;
        assert!((s.riemann.get(0, x, 0, x) - want).abs() < 1e-12, "e{x}");
    }
}

#[test]
fn chart_realisation_agrees_with_lie_group() {
    let lie = model("cosym5", &[("b", 0.5), ("c", 1.5)]);
    let chart = model("cosym_solvable", &[("b", 0.5), ("c", 1.5)]);
    let want = analyze_point(&lie.structure, 0.0, &Point::identity(), None, 1).unwrap();
    for p in chart.sample_points(3, 4) {
        let got = analyze_point(&chart.structure, 0.0, &p, None, 1).unwrap();
        for (a, b) in got.kmn.triple().iter().zip(want.kmn.triple()) {
            assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", got.kmn.triple(), want.kmn.triple());
        }
        assert!((got.curvature.tau - want.curvature.tau).abs() < 1e-5);
    }
}

#[test]
fn divided_fits_reproduce_catalog_coefficients() {
    for (name, kv) in [
        ("cosym5", vec![("b", 0.0), ("c", 2.0)]),
        ("cosym5", vec![("b", 1.0), ("c", 2.0)]),
        ("kenmotsu5", vec![("lambda", 0.5)]),
        ("kenmotsu5", vec![("lambda", 2.0)]),
    ] {
        let m = model(name, &kv);
        let class = m
            .structure
            .classify(&m.sample_points(1, 0), &ClassifyOptions::default())
            .unwrap();
        let pa = analyze_point(&m.structure, class.effective_alpha(), &Point::identity(), None, 1)
            .unwrap();
        let f = fit(&[FitSample::from_analysis(&pa)], &DIVIDED).unwrap();
        let want = &m.expected.divided.as_ref().unwrap().value;
        let got = &f.coeffs;
        for (a, b) in got.values.iter().zip(&want.values) {
            assert!((a - b).abs() < 1e-9, "{name} {kv:?}: {:?} vs {:?}", got.values, want.values);
        }
        let [kappa, mu, nu] = pa.kmn.triple();
        let predicted = predict_closed_form(&PredictInput {
            class: class.tag,
            dim: 5,
            kappa,
            mu,
            nu,
            dim3: Dim3Form::Closed,
        })
        .unwrap();
        assert!(f.compare(&predicted).unwrap().max_coeff_diff < 1e-9);
        assert_eq!(f.certificate().rank, 9);
    }
}

#[test]
fn dim3_closed_forms_match_tau_and_phi_sectional_forms() {
    for lambda in [0.5, 1.0, 2.0] {
        let m = model("kenmotsu3", &[("lambda", lambda)]);
        let pa = analyze_point(&m.structure, 1.0, &Point::identity(), None, 1).unwrap();
        let [kappa, mu, nu] = pa.kmn.triple();
        let base = PredictInput {
            class: StructureTag::AlmostKenmotsu,
            dim: 3,
            kappa,
            mu,
            nu,
            dim3: Dim3Form::Closed,
        };
        let closed = predict_closed_form(&base).unwrap();
        let tau = predict_closed_form(&PredictInput {
            dim3: Dim3Form::Tau(pa.curvature.tau),
            ..base
        })
        .unwrap();
        let l2 = lambda * lambda;
        // f1 = lambda^2 - 1, f3 = 2 lambda^2, f7 = 2
        let published = [l2 - 1.0, 0.0, 2.0 * l2, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0];
        for i in 0..9 {
            assert!((closed.values[i] - published[i]).abs() < 1e-9, "{:?}", closed.values);
            assert!((tau.values[i] - published[i]).abs() < 1e-6, "{:?}", tau.values);
        }
    }
}
