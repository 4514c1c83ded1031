use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pseudoform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoform"))
        .args(args)
        .env_remove("PSEUDOFORM_THREADS")
        .output()
        .expect("binary runs")
}

fn with_config(json: &str, args: &[&str]) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, json).unwrap();
    let mut all = args.to_vec();
    all.extend(["--config", path.to_str().unwrap()]);
    (pseudoform(&all), dir)
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

const CONTACT: &str = r#"{"pfaffian": ["0", "x", "1"], "region": {"lo": [-1, -1, -1], "hi": [1, 1, 1]}}"#;

#[test]
fn classify_contact_form() {
    let (out, _d) = with_config(CONTACT, &["classify"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["class"], "NON_INTEGRABLE");
    assert_eq!(v["result"]["max_frobenius"].as_f64().unwrap(), 1.0);
    // defaults are echoed
    assert_eq!(v["metadata"]["samples"], 100);
    assert_eq!(v["metadata"]["tolerance"].as_f64().unwrap(), 1e-8);
    assert_eq!(v["metadata"]["seed"], 0);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, _d1) = with_config(CONTACT, &["classify", "--seed", "9"]);
    let (b, _d2) = with_config(CONTACT, &["classify", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    let (c, _d3) = with_config(CONTACT, &["classify", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, CONTACT).unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_pseudoform"))
            .args(["classify", "--config", path.to_str().unwrap()])
            .env("PSEUDOFORM_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn foucault_geometry_at_the_pole() {
    let out = pseudoform(&[
        "foucault",
        "geometry",
        "--set",
        "pendulum.latitude=1.5707963267948966",
        "--set",
        "pendulum.earth_rate=7.292e-5",
        "--set",
        "pendulum.length=67",
    ]);
    let v = stdout_json(&out);
    let rate = 2.0 * 7.292e-5;
    let r = &v["result"];
    let k = r["curvature"]["gaussian"].as_f64().unwrap();
    assert!((k + 0.25 * rate * rate).abs() < 1e-10 * rate * rate);
    let mut ev: Vec<f64> = r["curvature"]["principal"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z["re"].as_f64().unwrap())
        .collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] + 0.5 * rate).abs() < 1e-10 * rate && (ev[1] - 0.5 * rate).abs() < 1e-10 * rate);
    assert_eq!(v["metadata"]["pendulum"]["gravity"].as_f64().unwrap(), 9.81);
    assert_eq!(v["metadata"]["metric"], "euclidean");
}

#[test]
fn foucault_geometry_galilean_is_flagged_not_failed() {
    let out = pseudoform(&[
        "foucault",
        "geometry",
        "--set",
        "pendulum.latitude=0.8",
        "--set",
        "pendulum.length=67",
        "--set",
        "metric=galilean",
    ]);
    let v = stdout_json(&out);
    assert!(v["result"]["curvature"].is_null());
    assert!(v["result"]["degeneracy"].as_str().unwrap().contains("g^ab"));
}

const STILL_EARTH: &str = r#"{
    "pendulum": {"latitude": 0.8, "earth_rate": 0, "length": 10},
    "initial": {"x": 0.1},
    "dt": 0.01,
    "duration": 5
}"#;

#[test]
fn sim_without_rotation_stays_on_the_x_axis() {
    let (out, _d) = with_config(STILL_EARTH, &["foucault", "sim"]);
    let (header, rows) = csv(&out);
    assert_eq!(header, ["t", "x", "y", "vx", "vy"]);
    assert_eq!(rows.len(), 501);
    assert!(rows.iter().all(|r| r[2] == 0.0));
    // the defaulted fields arrive on stderr when writing to stdout
    let meta: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(meta["metadata"]["stride"], 1);
    assert_eq!(meta["metadata"]["pendulum"]["gravity"].as_f64().unwrap(), 9.81);
}

#[test]
fn csv_to_file_gets_a_metadata_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, STILL_EARTH).unwrap();
    let out_path = dir.path().join("run.csv");
    let out = pseudoform(&[
        "foucault",
        "sim",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("t,x,y,vx,vy\n0,0.10000000000000001,0,0,0\n"));
    let meta: Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(&format!("{}.meta.json", out_path.display()))).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["command"], "foucault sim");
}

#[test]
fn precession_measures_the_vertical_rate() {
    // a fast-spinning planet keeps the run short
    let cfg = r#"{
        "pendulum": {"latitude": 0.6, "earth_rate": 0.01, "length": 2},
        "initial": {"x": 0.05},
        "dt": 0.005,
        "duration": 300,
        "stride": 2
    }"#;
    let (out, _d) = with_config(cfg, &["foucault", "precession", "--format", "json"]);
    let v = stdout_json(&out);
    let oracle = 0.01 * 0.6f64.sin();
    let rate = v["result"]["rate"].as_f64().unwrap();
    assert!((rate - oracle).abs() < 0.02 * oracle, "{rate} vs {oracle}");
    assert!(v["metadata"]["window"].as_f64().unwrap() > 0.0);

    let (out, _d) = with_config(cfg, &["foucault", "precession"]);
    let (header, rows) = csv(&out);
    assert_eq!(header, ["t", "x", "y", "vx", "vy", "plane_angle_rad"]);
    let last = rows.last().unwrap();
    assert!(last[5] > rows[0][5]);
}

#[test]
fn transport_tracks_the_frame() {
    let cfg = r#"{
        "pendulum": {"latitude": 0.5, "length": 1, "frame_rate": 0.2},
        "kind": "vector",
        "init": [0, 1, 0],
        "t1": 10,
        "dt": 0.01
    }"#;
    let (out, _d) = with_config(cfg, &["transport"]);
    let (header, rows) = csv(&out);
    assert_eq!(header, ["t", "v0", "v1", "v2"]);
    assert_eq!(rows.len(), 1001);
    for r in rows {
        assert!((r[2] - (0.2 * r[0]).cos()).abs() < 1e-9);
        assert!((r[3] - (0.2 * r[0]).sin()).abs() < 1e-9);
    }
}

#[test]
fn geodesic_on_the_sphere() {
    let cfg = r#"{"level_set": "x^2 + y^2 + z^2", "start": [1, 0, 0], "direction": [0, 1], "steps": 400, "ds": 0.015707963267948967}"#;
    let (out, _d) = with_config(cfg, &["geodesic"]);
    let (header, rows) = csv(&out);
    assert_eq!(header, ["s", "x1", "x2", "x3", "v1", "v2", "v3"]);
    assert_eq!(rows.len(), 401);
    for r in &rows {
        assert!(((r[1] * r[1] + r[2] * r[2] + r[3] * r[3]).sqrt() - 1.0).abs() < 1e-9);
    }
    let half = &rows[200];
    assert!((half[1] + 1.0).abs() < 1e-8);
}

#[test]
fn surface_reports_sphere_curvature() {
    let cfg = r#"{"level_set": "x^2 + y^2 + z^2", "points": [[0, 0, 1], [0.6, 0.8, 0]]}"#;
    let (out, _d) = with_config(cfg, &["surface"]);
    let v = stdout_json(&out);
    for p in v["result"]["points"].as_array().unwrap() {
        assert!((p["curvature"]["gaussian"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    let (out, _d) = with_config(cfg, &["surface", "--format", "csv"]);
    let (header, rows) = csv(&out);
    assert_eq!(header.len(), 16);
    assert_eq!(rows.len(), 2);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(pseudoform(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pseudoform(&[]).status.code(), Some(1));
    assert_eq!(pseudoform(&["classify", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(pseudoform(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let (out, _d) = with_config(
        r#"{"pfaffian": ["0", "x", "1"], "region": {"lo": [0,0,0], "hi": [1,1,1]}, "colour": 1}"#,
        &["classify"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let (out, _d) = with_config(
        r#"{"pfaffian": ["0", "x*(", "1"], "region": {"lo": [0,0,0], "hi": [1,1,1]}}"#,
        &["classify"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pfaffian") && err.contains("component 2"), "{err}");

    let out = pseudoform(&[
        "foucault",
        "sim",
        "--set",
        "pendulum.latitude=0.5",
        "--set",
        "pendulum.length=-1",
        "--set",
        "initial.x=0.1",
        "--set",
        "dt=0.1",
        "--set",
        "duration=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("length"));

    let out = pseudoform(&["foucault", "sim", "--set", "pendulum.latitude=\"north\""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pendulum.latitude"));

    let out = pseudoform(&["classify", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = pseudoform(&[
        "foucault",
        "geometry",
        "--set",
        "pendulum.latitude=0.5",
        "--set",
        "pendulum.length=1",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3_and_name_the_point() {
    let cfg = r#"{"level_set": "x^2 + y^2 + z^2", "points": [[0, 0, 1], [0, 0, 0]]}"#;
    let (out, _d) = with_config(cfg, &["surface"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("points[1]"), "{err}");

    let cfg = r#"{
        "pendulum": {"latitude": 0.6, "earth_rate": 0, "length": 2},
        "initial": {"x": 0.0},
        "dt": 0.01,
        "duration": 30
    }"#;
    let (out, _d) = with_config(cfg, &["foucault", "precession"]);
    assert_eq!(out.status.code(), Some(3));
}
