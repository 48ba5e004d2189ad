use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn valkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str, contents: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn intrinsic_unit_cube() {
    let out = valkit(&["intrinsic", "--input", &data("cube3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let vols: Vec<f64> = v["result"]["volumes"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(vols, vec![1.0, 3.0, 3.0, 1.0]);
    assert_eq!(v["version"], valkit_core::VERSION);
    assert_eq!(v["config"]["command"], "intrinsic");
}

#[test]
fn intrinsic_point() {
    let out = valkit(&["intrinsic", "--input", &data("point2.json")]);
    let v = json(&out);
    let vols: Vec<f64> = v["result"]["volumes"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(vols, vec![1.0, 0.0, 0.0]);
}

#[test]
fn malformed_json_exits_2() {
    let bad = scratch("bad.json", "{\"vertices\": [[\"0\"");
    let out = valkit(&["intrinsic", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
    let wrong = scratch("wrong.json", "{\"verts\": []}");
    assert_eq!(valkit(&["intrinsic", "--input", &wrong]).status.code(), Some(2));
    let missing = valkit(&["intrinsic", "--input", "/nonexistent/x.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn dimension_flag_is_validated() {
    let out = valkit(&["intrinsic", "--input", &data("cube3.json"), "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn crofton_ratio_table() {
    let out = valkit(&[
        "crofton", "--input", &data("square.json"), "--input", &data("triangle.json"), "--input",
        &data("rectangle.json"), "--n", "2", "--k", "1", "--i", "1", "--samples", "100000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let expected = v["result"]["expected_ratio"].as_f64().unwrap();
    assert!((expected - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    let ratios: Vec<f64> =
        v["result"]["bodies"].as_array().unwrap().iter().map(|b| b["ratio"].as_f64().unwrap()).collect();
    for r in &ratios {
        assert!((r / ratios[0] - 1.0).abs() < 0.01, "{ratios:?}");
        assert!((r / expected - 1.0).abs() < 0.01);
    }
}

#[test]
fn crofton_csv_series() {
    let out = valkit(&["crofton", "--input", &data("square.json"), "--k", "1", "--i", "1", "--samples", "10000", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["N", "estimate", "stderr"]);
    let ns: Vec<usize> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(ns, vec![100, 1000, 10000]);
    assert!(text.starts_with(&format!("# valkit {}\n# config ", valkit_core::VERSION)));
}

#[test]
fn crofton_full_dimension_is_exact() {
    let out = valkit(&["crofton", "--input", &data("cube3.json"), "--k", "3", "--i", "2"]);
    let v = json(&out);
    let b = &v["result"]["bodies"][0];
    assert_eq!(b["estimate"].as_f64(), Some(3.0));
    assert_eq!(b["stderr"].as_f64(), Some(0.0));
}

#[test]
fn crofton_degree_above_plane_exits_2() {
    let out = valkit(&["crofton", "--input", &data("square.json"), "--k", "1", "--i", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn radon_octants_pass() {
    for (file, n) in [("octant2.json", 2), ("octant3.json", 3)] {
        let out = valkit(&["radon-check", "--input", &data(file), "--points", "100"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["result"]["n"], n);
        assert_eq!(v["result"]["all_pass"], true);
        let pts = v["result"]["points"].as_array().unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().any(|p| p["lhs"] != "0"));
    }
}

#[test]
fn radon_non_pointed_exits_2() {
    let out = valkit(&["radon-check", "--input", &data("halfspace_cone.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fourier_fixes_constant_half() {
    let out = valkit(&["fourier2d", "--input", &data("density_half.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["input"], v["result"]["transform"]);
    assert_eq!(v["result"]["square_is_antipode"], true);
}

#[test]
fn fourier_rejects_first_harmonic() {
    let f = scratch("k1.json", r#"{"N": 2, "coeffs": [{"k": 1, "re": "1", "im": "0"}]}"#);
    assert_eq!(valkit(&["fourier2d", "--input", &f]).status.code(), Some(2));
}

#[test]
fn euler_boundary_of_square() {
    let out = valkit(&["euler", "--input", &data("square_boundary.json")]);
    let v = json(&out);
    assert_eq!(v["result"]["integral"], "0");
    assert_eq!(v["result"]["support_codim"], 1);
}

#[test]
fn hadwiger_fit_recovers_coefficients() {
    let out = valkit(&["hadwiger-fit", "--input", &data("fit_3v0_2v2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let c: Vec<f64> = v["result"]["coefficients"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in c.iter().zip([3.0, 0.0, 2.0]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn hadwiger_fit_of_non_invariant_valuation_breaches() {
    let out = valkit(&["hadwiger-fit", "--input", &data("mink_segment.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stdout.is_empty());
}

#[test]
fn mixed_volume_square_triangle() {
    let out = valkit(&["mixed-volume", "--input", &data("square.json"), "--input", &data("triangle.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["mixed_volume"], "1");
    assert_eq!(v["result"]["agree"], true);
}

#[test]
fn out_flag_writes_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cube_out.json");
    let out = valkit(&["intrinsic", "--input", &data("cube3.json"), "--out", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["n"], 3);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["crofton", "--input", &data("triangle.json"), "--k", "1", "--i", "1", "--samples", "20000", "--shards", "4", "--seed", "7"];
    let a = valkit(&args);
    let b = valkit(&args);
    assert_eq!(a.stdout, b.stdout);
    let r1 = valkit(&["radon-check", "--input", &data("octant3.json"), "--seed", "3", "--format", "csv"]);
    let r2 = valkit(&["radon-check", "--input", &data("octant3.json"), "--seed", "3", "--format", "csv"]);
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn seed_changes_monte_carlo_output() {
    let a = valkit(&["crofton", "--input", &data("square.json"), "--k", "1", "--i", "1", "--seed", "1"]);
    let b = valkit(&["crofton", "--input", &data("square.json"), "--k", "1", "--i", "1", "--seed", "2"]);
    assert_ne!(json(&a)["result"]["bodies"][0]["estimate"], json(&b)["result"]["bodies"][0]["estimate"]);
}
