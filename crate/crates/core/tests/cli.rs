use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocycle")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_exit_codes() {
    let a2 = json(&run(&["beautify", "--target", "geo2"]))["value"][0].as_f64().unwrap();
    let ok = run(&["verify", "--curve", &format!("geo-tetra:a={a2}"), "--t", "2"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["is_design"], true);
    let no = run(&["verify", "--curve", "platonic:tetra", "--t", "2"]);
    assert_eq!(code(&no), 1);
    assert_eq!(json(&no)["is_design"], false);
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["verify", "--curve", bad.to_str().unwrap(), "--t", "2"])), 2);
    assert_eq!(code(&run(&["verify", "--curve", "geo-tetra:a=9", "--t", "2"])), 2);
    assert_eq!(code(&run(&["beautify", "--target", "geo9"])), 2);
    assert_eq!(code(&run(&["verify", "--t", "2"])), 2);
}

#[test]
fn area_command() {
    for curve in ["smooth:t=2,a=0.7778", "geo-tetra:a=0.3"] {
        let out = run(&["area", "--curve", curve]);
        assert_eq!(code(&out), 0);
        assert!((json(&out)["area"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
}

#[test]
fn sample_command_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = dir.path().join("circle.json");
    std::fs::write(
        &cycle,
        r#"{"dim":3,"control_points":[[1,0,0],[0,1,0],[-1,0,0],[0,-1,0]],"closed":true}"#,
    )
    .unwrap();
    let out = run(&["sample", "--curve", cycle.to_str().unwrap(), "--count", "5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,x0,x1,x2,speed");
    assert_eq!(lines.len(), 6);
    let row = |i: usize| -> Vec<f64> { lines[i].split(',').map(|v| v.parse().unwrap()).collect() };
    for i in 1..=5 {
        let r = row(i);
        assert!((r[1] * r[1] + r[2] * r[2] + r[3] * r[3] - 1.0).abs() < 1e-12);
        assert!((r[4] - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
    assert_eq!(row(1)[1..4], row(5)[1..4]);
    assert_eq!(code(&run(&["sample", "--curve", "geo-tetra:a=0.3", "--count", "1"])), 2);
}

#[test]
fn optimize_writes_cycle_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("opt.json");
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "optimize",
        "--init",
        "platonic:tetra",
        "--t",
        "2",
        "--out",
        out_path.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["converged"], true);
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("iter,objective\n"));
    let verify = run(&["verify", "--curve", out_path.to_str().unwrap(), "--t", "2", "--tol", "1e-8"]);
    assert_eq!(code(&verify), 0);
    assert_eq!(code(&run(&["optimize", "--init", "smooth:t=2,a=0.7", "--t", "2"])), 2);
}

#[test]
fn mz_build_and_test() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = dir.path().join("mz.json");
    let report = dir.path().join("report.json");
    let built = run(&["mz", "build", "--t", "3", "--out", cycle.to_str().unwrap()]);
    assert_eq!(code(&built), 0);
    assert_eq!(json(&built)["n"], 36);
    assert!(Path::new(&cycle).exists());
    let tested = run(&[
        "mz", "test", "--cycle", cycle.to_str().unwrap(), "--t", "3", "--p", "inf", "--samples", "20", "--seed", "1",
        "--out", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&tested), 0);
    let r = json(&tested);
    assert_eq!(r["p"], "inf");
    assert!(r["ratio_max"].as_f64().unwrap() <= 1.0 + 1e-9);
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved, r);
}

#[test]
fn wce_methods_agree() {
    let a = json(&run(&["wce", "--curve", "platonic:cube", "--t", "3"]))["wce"].as_f64().unwrap();
    let b = json(&run(&["wce", "--curve", "platonic:cube", "--t", "3", "--method", "double-integral"]))["wce"]
        .as_f64()
        .unwrap();
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn family_json_is_accepted() {
    let out = run(&["area", "--curve", r#"{"family":"geo-octa","params":{"a":0.6}}"#]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["area"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}
