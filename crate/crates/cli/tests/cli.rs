use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn body(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bodies");
    root.join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mongefoil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

/// Data rows of a CSV output split into fields.
fn rows(out: &Output) -> Vec<Vec<String>> {
    stdout(out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn field(row: &[String], k: usize) -> f64 {
    row[k].parse().unwrap()
}

#[test]
fn extremal_square_and_triangle() {
    let out = run(&["extremal", &body("square.json"), "--dir", "1,0 0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["rho"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["area"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);

    let out = run(&["extremal", &body("triangle.json"), "--dir", "1,0 0,0"]);
    let v = json(&out);
    assert!((v["rho"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["degenerate"], Value::Bool(true));
    assert!((v["center"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn extremal_rejects_bad_input() {
    let zero = run(&["extremal", &body("square.json"), "--dir", "0,0 0,0"]);
    assert_eq!(zero.status.code(), Some(2));
    let short = run(&["extremal", &body("square.json"), "--dir", "1,0"]);
    assert_eq!(short.status.code(), Some(2));
    let missing = run(&["extremal", "/nonexistent.json", "--dir", "1,0 0,0"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn vk_values_and_header() {
    let out = run(&[
        "vk",
        &body("square.json"),
        "--point",
        "2,0 0,0",
        "--point",
        "0.5,0 -0.5,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next().unwrap(), "re_z1,im_z1,re_z2,im_z2,V,status,residual");
    let r = rows(&out);
    assert!((field(&r[0], 4) - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-10);
    assert!(field(&r[1], 4).abs() < 1e-12);

    let ball = run(&["vk", &body("ball.json"), "--point", "1,0 0,1"]);
    let r = rows(&ball);
    assert!((field(&r[0], 4) - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-9);
}

#[test]
fn vk_grid_and_point_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.txt");
    std::fs::write(&path, "# points\n2,0 0,0\n\n0,1 0,0  # imaginary\n").unwrap();
    let out = run(&["vk", &body("square.json"), "--points", path.to_str().unwrap()]);
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    assert!((field(&r[1], 4) - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-10);

    let out = run(&["vk", &body("square.json"), "--grid", "re1=-2:2:3,im1=0,re2=0,im2=0:1:2"]);
    let r = rows(&out);
    assert_eq!(r.len(), 6);
    assert_eq!(field(&r[0], 0), -2.0);
    assert_eq!(field(&r[1], 3), 1.0);
    assert!(r.iter().all(|row| row[5] != "failed"));
}

#[test]
fn robin_values_and_row_errors() {
    let out = run(&["robin", &body("square.json"), "--dir", "1,0 0,0", "--dir", "0,0 0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&out);
    assert!((field(&r[0], 4) - 2f64.ln()).abs() < 1e-12);
    assert!((field(&r[0], 5) - 0.5).abs() < 1e-12);
    assert!(r[1][6].starts_with("error"));

    let strict = run(&["robin", &body("square.json"), "--dir", "0,0 0,0", "--strict"]);
    assert_eq!(strict.status.code(), Some(3));

    let neg = run(&["robin", &body("square.json"), "--dir", "-1,0 0,0"]);
    assert!((field(&rows(&neg)[0], 4) - 2f64.ln()).abs() < 1e-12);

    let ball = run(&["robin", &body("ball.json"), "--dir", "1,0 0,1"]);
    assert!((field(&rows(&ball)[0], 4) - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn indicatrix_slice_origin_row() {
    let out = run(&[
        "indicatrix-slice",
        &body("square.json"),
        "--e1",
        "1,0 0,0",
        "--e2",
        "0,0 1,0",
        "--s",
        "-1:1:3",
        "--t",
        "0:1:2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&out);
    assert_eq!(r.len(), 6);
    let origin = r.iter().find(|row| field(row, 0) == 0.0 && field(row, 1) == 0.0).unwrap();
    assert_eq!(origin[2], "-inf");
    assert_eq!(origin[3], "origin");
    let unit = r.iter().find(|row| field(row, 0) == 1.0 && field(row, 1) == 0.0).unwrap();
    assert!((field(unit, 2) - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn symmetrize_bodies() {
    let tri = json(&run(&["symmetrize", &body("triangle.json")]));
    assert_eq!(tri["type"], "vpoly");
    assert_eq!(tri["vertices"].as_array().unwrap().len(), 6);

    let sq = json(&run(&["symmetrize", &body("square.json")]));
    assert_eq!(sq["vertices"].as_array().unwrap().len(), 4);

    let bad = run(&["symmetrize", &body("degenerate.json")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn symmetrized_body_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sym.json");
    let out = run(&["symmetrize", &body("triangle.json"), "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r = run(&["robin", path.to_str().unwrap(), "--dir", "1,0 0,0"]);
    // Real directions agree with the original body.
    let orig = run(&["robin", &body("triangle.json"), "--dir", "1,0 0,0"]);
    assert!((field(&rows(&r)[0], 4) - field(&rows(&orig)[0], 4)).abs() < 1e-12);
}

#[test]
fn verify_suites() {
    let sq = run(&["verify", &body("square.json"), "--suite", "foliation", "--seed", "7"]);
    assert_eq!(sq.status.code(), Some(0));
    assert_eq!(json(&sq)["passed"], Value::Bool(true));

    let tri = run(&["verify", &body("triangle.json"), "--suite", "robin", "--seed", "7"]);
    assert_eq!(tri.status.code(), Some(0));

    let hept = run(&["verify", &body("heptagon.json"), "--seed", "3"]);
    assert_eq!(hept.status.code(), Some(0));

    let unknown = run(&["verify", &body("square.json"), "--suite", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn foliate_is_reproducible_across_thread_counts() {
    let a = run(&["foliate", &body("heptagon.json"), "--count", "12", "--seed", "5", "--jobs", "1"]);
    let b = run(&["foliate", &body("heptagon.json"), "--count", "12", "--seed", "5", "--jobs", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a).as_array().unwrap().len(), 12);

    let c = run(&["foliate", &body("heptagon.json"), "--count", "12", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn batch_order_is_stable_across_thread_counts() {
    let grid = "re1=-3:3:7,im1=0:1:2,re2=0.5,im2=-1:1:2";
    let a = run(&["vk", &body("triangle.json"), "--grid", grid, "--jobs", "1"]);
    let b = run(&["vk", &body("triangle.json"), "--grid", grid, "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rescale_reports_original_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    std::fs::write(
        &path,
        r#"{"type": "vpoly", "vertices": [[100, 100], [104, 100], [100, 102]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    for args in [
        vec!["vk", p, "--point", "110,0 101,0.5"],
        vec!["robin", p, "--dir", "1,0.3 -0.2,0"],
    ] {
        let plain = rows(&run(&args));
        let mut scaled = args.clone();
        scaled.push("--rescale");
        let scaled = rows(&run(&scaled));
        let (a, b) = (field(&plain[0], 4), field(&scaled[0], 4));
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{args:?}: {a} vs {b}");
    }
    let plain = json(&run(&["extremal", p, "--dir", "1,0 0,1"]));
    let scaled = json(&run(&["extremal", p, "--dir", "1,0 0,1", "--rescale"]));
    for key in ["rho", "area"] {
        let (a, b) = (plain[key].as_f64().unwrap(), scaled[key].as_f64().unwrap());
        assert!((a - b).abs() < 1e-9 * a, "{key}: {a} vs {b}");
    }
    for k in 0..2 {
        let (a, b) = (plain["center"][k].as_f64().unwrap(), scaled["center"][k].as_f64().unwrap());
        assert!((a - b).abs() < 1e-9 * a.abs(), "center: {a} vs {b}");
    }
}
