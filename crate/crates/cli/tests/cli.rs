//! End-to-end runs of the `acm` binary: exit codes and report contents.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn acm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acm"))
        .args(args)
        .output()
        .expect("run acm")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn spec_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check '{name}' in {:#}", r["checks"]))
}

#[test]
fn classify_kenmotsu() {
    let out = acm(&["classify", "--catalog", "kenmotsu5", "--param", "lambda=1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["classification"]["tag"], "almost_kenmotsu");
    assert_eq!(r["passed"], true);
    assert_eq!(r["command"], "classify");
    assert_eq!(r["seed"], 42);
}

#[test]
fn undivided_writing_is_obstructed_in_dimension_five() {
    let out = acm(&[
        "decompose", "--catalog", "cosym5", "--param", "b=0", "--param", "c=2", "--basis",
        "undivided",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    let d = &r["decomposition"];
    assert_eq!(d["basis"], "undivided");
    assert!(d["residual"].as_f64().unwrap() > 1e-3);
    assert_eq!(d["obstruction"]["obstructed"], true);
    assert_eq!(r["passed"], false);
}

#[test]
fn divided_writing_of_cosym5_matches_the_closed_form() {
    let out = acm(&["decompose", "--catalog", "cosym5", "--param", "b=0", "--param", "c=2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let d = &r["decomposition"];
    assert_eq!(d["certificate"]["rank"], 9);
    assert_eq!(d["certificate"]["unique"], true);
    let diff = d["prediction"]["comparison"]["max_coeff_diff"].as_f64().unwrap();
    assert!(diff < 1e-5, "{diff}");
    assert!(d.get("obstruction").is_none());
}

#[test]
fn flat_model_verifies_with_zero_residuals() {
    let out = acm(&["verify", "--catalog", "cosym_flat", "--param", "n=1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["residual"].as_f64(), Some(0.0), "{c}");
        assert_eq!(c["passed"], true);
    }
    assert_eq!(r["decomposition"]["trivial"], true);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = acm(&["kmn", "--catalog", "cosym3", "--param", "b=0.1", "--param", "c=0.7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"b\": 1.0000000000000001e-1"), "{text}");
    assert!(!text.contains("timestamp"));
}

#[test]
fn out_flag_writes_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = acm(&["kmn", "--catalog", "kenmotsu3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let stdout = acm(&["kmn", "--catalog", "kenmotsu3"]).stdout;
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn seeds_change_chart_samples_but_runs_repeat() {
    let a = acm(&["kmn", "--catalog", "kenmotsu_warped", "--points", "2"]).stdout;
    let b = acm(&["kmn", "--catalog", "kenmotsu_warped", "--points", "2"]).stdout;
    let c = acm(&["kmn", "--catalog", "kenmotsu_warped", "--points", "2", "--seed", "7"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
    let r: Value = serde_json::from_slice(&c).unwrap();
    assert_eq!(r["points"].as_array().unwrap().len(), 2);
}

#[test]
fn deformation_of_a_chart_model() {
    let out = acm(&[
        "deform", "--catalog", "cosym_solvable", "--beta", "exp(t)", "--alpha-d", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["deformation"]["beta"], "exp(t)");
    assert_eq!(r["deformation"]["deformed_class"], "almost_cosymplectic");
    assert_eq!(r["deformation"]["points"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_with_a_constant_deformation() {
    let out = acm(&["verify", "--catalog", "cosym5", "--beta", "2", "--alpha-d", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert!(r["deformation"].is_object());
    assert!(r["decomposition"].is_object());
}

#[test]
fn usage_errors_exit_with_one() {
    let cases: &[&[&str]] = &[
        &["classify", "--catalog", "nonexistent"],
        &["classify", "--catalog", "kenmotsu5", "--param", "lambda=-1"],
        &["classify", "--catalog", "kenmotsu5", "--param", "mu=1"],
        &["classify", "--catalog", "kenmotsu5", "--param", "lambda"],
        &["classify"],
        &["kmn", "--catalog", "cosym3", "--points", "0"],
        &["verify", "--catalog", "cosym3", "--tol", "-1"],
        &["deform", "--catalog", "cosym5"],
        &["deform", "--catalog", "cosym5", "--beta", "exp(t)"],
        &["deform", "--catalog", "cosym5", "--beta", "2 *"],
        &["deform", "--catalog", "cosym5", "--beta", "0"],
        &["deform", "--catalog", "kenmotsu5", "--beta", "2"],
        &["frobnicate"],
        &["classify", "--catalog", "cosym3", "--bogus"],
    ];
    for args in cases {
        let out = acm(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!stderr(&out).is_empty(), "{args:?}");
    }
    let help = acm(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn non_finite_values_name_the_operation() {
    let out = acm(&["deform", "--catalog", "cosym_solvable", "--beta", "ln(t - 10)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("beta"), "{}", stderr(&out));
    let out = acm(&["classify", "--catalog", "cosym3", "--param", "b=nan"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("finite"), "{}", stderr(&out));
}

#[test]
fn malformed_spec_reports_line_and_column() {
    let f = spec_file("{\n  \"backend\": \"lie\",\n  \"dim\": 3,\n  \"phi\": [1, 2,\n}");
    let out = acm(&["classify", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains(":4:11: invalid type"), "{msg}");
    assert!(!msg.contains("at line"), "{msg}");
    let missing = acm(&["classify", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

/// Lie algebra with `[e1, e2] = 2 e0`, `xi = e0`: a Sasakian structure.
const CONTACT_SPEC: &str = r#"{
    "backend": "lie",
    "dim": 3,
    "structure_constants": [
        [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 0, 0], [2, 0, 0]],
        [[0, 0, 0], [-2, 0, 0], [0, 0, 0]]
    ],
    "phi": [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
    "xi_index": 0
}"#;

#[test]
fn lie_spec_files_are_classified() {
    let f = spec_file(CONTACT_SPEC);
    let out = acm(&["classify", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["classification"]["tag"], "contact_metric");
    assert!(r.get("expected").is_none());
}

#[test]
fn verify_stops_when_the_structure_is_outside_the_family() {
    let f = spec_file(CONTACT_SPEC);
    let out = acm(&["verify", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["failure"]["stage"], "classification");
    assert!(r.get("kmn").is_none());
    assert!(r.get("decomposition").is_none());
    assert_eq!(check(&r, "structure is almost alpha-cosymplectic")["passed"], false);
}

#[test]
fn failed_axioms_short_circuit() {
    // phi^2 != -I + eta (x) xi: phi rotates by a non-right angle
    let spec = CONTACT_SPEC.replace(
        "[[0, 0, 0], [0, 0, -1], [0, 1, 0]]",
        "[[0, 0, 0], [0, 0.5, -1], [0, 1, 0.5]]",
    );
    let f = spec_file(&spec);
    let out = acm(&["verify", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["failure"]["stage"], "validation");
    assert_eq!(check(&r, "structure satisfies the axioms")["passed"], false);
    assert!(r.get("classification").is_none());
}

#[test]
fn chart_spec_with_sample_points_and_tolerances() {
    let spec = r#"{
        "backend": "chart",
        "dim": 5,
        "catalog": {"name": "kenmotsu_warped", "params": {"n": 2, "c": 0.5}},
        "sample_points": [[0.1, 0.2, -0.1, 0.0, 0.3]],
        "tolerances": {"identity": 1e-4}
    }"#;
    let f = spec_file(spec);
    let out = acm(&["kmn", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["points"].as_array().unwrap().len(), 1);
    assert_eq!(r["tolerances"]["identity"].as_f64(), Some(1e-4));
    let k = &r["kmn"][0];
    assert!((k["kappa"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert_eq!(k["h_vanishes"], true);

    // --param overrides the file; --tol overrides the file tolerances
    let out = acm(&[
        "kmn", "--spec", f.path().to_str().unwrap(), "--param", "c=2", "--tol", "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["spec"]["catalog"]["params"]["c"].as_f64(), Some(2.0));
    assert_eq!(r["tolerances"]["identity"].as_f64(), Some(1e-3));

    let outside = spec.replace("[0.1, 0.2, -0.1, 0.0, 0.3]", "[9.0, 0.2, -0.1, 0.0, 0.3]");
    let f = spec_file(&outside);
    let out = acm(&["kmn", "--spec", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("outside"), "{}", stderr(&out));
}

#[test]
fn catalog_listing_and_entry() {
    let out = acm(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let names: Vec<&str> = r["catalog"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    for n in ["cosym_flat", "kenmotsu_warped", "cosym3", "cosym5", "kenmotsu3", "kenmotsu5"] {
        assert!(names.contains(&n), "{names:?}");
    }
    let out = acm(&["catalog", "--catalog", "kenmotsu5", "--param", "lambda=2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["expected"]["kmn"]["value"][0].as_f64(), Some(-5.0));
    assert_eq!(r["expected"]["kmn"]["origin"], "published");
}
