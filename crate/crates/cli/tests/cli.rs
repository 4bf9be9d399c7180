use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use stit_core::Tessellation;

const ISO: &str = r#"{"isotropic_mass": 6.283185307179586}"#;

fn stit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn measure_reports_cauchy_perimeter() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.json",
        &format!(r#"{{"measure": {ISO}, "set": {{"builtin": "unit_square"}}}}"#),
    );
    let out = stit(&["measure", "--config", cfg.to_str().unwrap(), "--no-timestamp"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["lambda_hit"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((v["kappa"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert_eq!(v["zeta"].as_array().unwrap().len(), 16);
    assert!(v["header"].get("timestamp_unix").is_none());
}

#[test]
fn tiny_time_renders_a_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        &format!(
            r#"{{"measure": {ISO}, "window": {{"vertices": [[0,0],[4,0],[4,3],[0,3]]}}, "time": 1e-12, "seed": 3}}"#
        ),
    );
    let svg = dir.path().join("t.svg");
    let out = stit(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(svg).unwrap();
    assert_eq!(text.matches(r#"class="cell""#).count(), 1);
    assert!(text.contains("stroke-dasharray"));
    // stroke width is 0.2% of the window diameter 5
    assert!(text.contains(r#"stroke-width="0.010000""#));
}

#[test]
fn tessellation_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        &format!(
            r#"{{"measure": {ISO}, "window": {{"vertices": [[0,0],[6,0],[6,6],[0,6]]}}, "time": 1.5, "seed": 11}}"#
        ),
    );
    let out_path = dir.path().join("t.json");
    let out = stit(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let t: Tessellation = serde_json::from_value(doc["tessellation"].clone()).unwrap();
    assert!(t.live_cells.len() > 1);
    let again = serde_json::to_value(&t).unwrap();
    assert_eq!(again, doc["tessellation"]);
    let direct = stit_core::stit::simulate(&stit_core::SimulationParams::new(
        stit_core::Polygon::rectangle(0.0, 0.0, 6.0, 6.0),
        1.5,
        stit_core::DirectionalMeasure::isotropic(std::f64::consts::TAU),
        11,
    ))
    .unwrap();
    assert_eq!(t.live_cells.len(), direct.live_cells.len());
    for (a, b) in t.live_cells.iter().zip(&direct.live_cells) {
        assert_eq!(a.polygon, b.polygon);
    }
}

#[test]
fn capacity_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(r#"{{"measure": {ISO}, "set": {{"builtin": "unit_segment"}}, "time": 1.0, "n": 500, "seed": 5}}"#),
    );
    let run = |extra: &[&str]| {
        let mut args = vec!["capacity", "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = stit(&args);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run(&["--no-timestamp"]);
    assert_eq!(a, run(&["--no-timestamp"]));
    let stamped = run(&[]);
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("# timestamp_unix"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&stamped), strip(&a));
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[1].starts_with("# config: ") && lines[1].contains(r#""seed":5"#));
    assert_eq!(lines[2], "query_id,a,n,mean,stderr,analytic,seed");
    assert!(lines[3].starts_with("query,1.0,500,"));

    let overridden = run(&["--no-timestamp", "--seed", "6", "--n", "300"]);
    assert!(overridden.contains(r#""seed":6"#) && overridden.contains(",300,"));
}

#[test]
fn missing_seed_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(r#"{{"measure": {ISO}, "set": {{"builtin": "unit_square"}}, "time": 1.0, "n": 10}}"#),
    );
    let out = stit(&["capacity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn degenerate_measure_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.json",
        r#"{"measure": {"atoms": [{"angle_radians": 0.0, "mass": 1.0}]}, "set": {"builtin": "unit_square"}}"#,
    );
    let out = stit(&["measure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate directional measure"));
    assert_eq!(stit(&["measure"]).status.code(), Some(2));
    assert_eq!(stit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn mixing_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "x.json",
        &format!(r#"{{"measure": {ISO}, "direction_radians": 0.0, "distances": [5, 10, 50], "time": 1.0, "seed": 1}}"#),
    );
    let out = stit(&["mixing", "--config", cfg.to_str().unwrap(), "--no-timestamp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        body[0],
        "h_norm,zeta,product_exact,joint_gamma_exact,ratio_minus_one,asymptote,gamma_complement_bound,joint_mc_mean,joint_mc_stderr,chi_bound"
    );
    assert_eq!(body.len(), 4);
    assert!(body[1].starts_with("5.0,2.0,"));
}

#[test]
fn iterate_matches_doubled_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "i.json",
        &format!(
            r#"{{"measure": {ISO}, "set": {{"builtin": "unit_square"}}, "time": 0.25, "extra_time": 0.25, "n": 3000, "seed": 2}}"#
        ),
    );
    let out = stit(&["iterate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert!((v["analytic"].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-12);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn fast_validation_passes() {
    let out = stit(&["validate", "fast"]);
    let v = json_of(&out);
    assert_eq!(out.status.code(), Some(0), "{v}");
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["failures"].as_array().unwrap().is_empty());
    assert!(v["checks"].as_array().unwrap().len() >= 7);
}
