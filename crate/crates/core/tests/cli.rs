//! End-to-end runs of the `spinlock` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spinlock"));
    c.env_remove("SPINLOCK_THREADS");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn schema(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn python_has(module: &str) -> bool {
    Command::new("python3")
        .args(["-c", &format!("import {module}")])
        .output()
        .is_ok_and(|o| o.status.success())
}

/// Validates each `(document, schema)` pair with the Python `jsonschema`
/// package; skipped with a note when it is not installed.
fn validate(pairs: &[(PathBuf, PathBuf)]) {
    if !python_has("jsonschema") {
        eprintln!("python3 with jsonschema not found; schema validation skipped");
        return;
    }
    let script = r#"
import json, sys, jsonschema
args = sys.argv[1:]
for doc, sch in zip(args[::2], args[1::2]):
    schema = json.load(open(sch))
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.Draft202012Validator(schema).validate(json.load(open(doc)))
"#;
    let mut c = Command::new("python3");
    c.args(["-c", script]);
    for (d, s) in pairs {
        c.arg(d).arg(s);
    }
    let out = c.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

const SMALL_SCAN: [&str; 4] = ["--set", "scan.n_e=6", "--set", "scan.n_lambda=5"];

#[test]
fn every_json_output_matches_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    let pair = data("triaxial_pair.json");
    let pluto = data("pluto_charon.json");
    let units = r#"convert_units.units={"period":6.387,"total_mass":1.46e22,"total_inertia":1e33}"#;
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("orbit", vec!["--system", pair.to_str().unwrap()]),
        ("lambdas", vec!["--system", pluto.to_str().unwrap()]),
        ("lambdas", vec!["--system", pair.to_str().unwrap()]),
        ("periodic", vec!["--system", pair.to_str().unwrap()]),
        ("floquet", vec!["--system", pluto.to_str().unwrap(), "--set", "floquet.delta=[0.001,0.001]"]),
        ("conditions", vec!["--system", pluto.to_str().unwrap()]),
        ("scan", SMALL_SCAN.to_vec()),
        ("stokes", vec!["--system", pair.to_str().unwrap()]),
        ("full-model", vec!["--system", pair.to_str().unwrap(), "--set", "full_model.periods=1"]),
        ("convert-units", vec!["--set", units]),
    ];
    let mut pairs = Vec::new();
    for (i, (cmd, extra)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}-{cmd}.json"));
        let mut args = vec![*cmd, "--output", path.to_str().unwrap()];
        args.extend(extra);
        let out = run(&args);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["command"], *cmd);
        pairs.push((path, schema(cmd)));
    }
    for f in ["pluto_charon.json", "patroclus_menoetius.json", "triaxial_pair.json"] {
        pairs.push((data(f), schema("system")));
    }
    let err = dir.path().join("error.json");
    let out = run(&["floquet"]);
    std::fs::write(&err, &out.stderr).unwrap();
    pairs.push((err, schema("error")));
    validate(&pairs);
}

#[test]
fn invalid_config_reports_json_error() {
    for args in [
        vec!["conditions"],
        vec!["scan", "--format", "svg", "--set", "scan.n_e=0"],
        vec!["conditions", "--format", "svg", "--system", "x.json"],
        vec!["scan", "--set", "scan.bogus=1"],
        vec!["--config", "/nonexistent/run.json"],
        vec!["orbit", "--set", r#"system={"e":1.5,"a":1,"C1":0.5,"lambda1":0.1,"lambda2":0.1,"dhat1":0,"qhat1":0}"#],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&out.stderr).expect("error JSON");
        assert_eq!(v["error"]["kind"], "config", "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn outputs_are_deterministic() {
    let pair = data("triaxial_pair.json");
    let p = pair.to_str().unwrap();
    for args in [
        vec!["periodic", "--system", p, "--format", "csv"],
        vec!["floquet", "--system", p],
        vec!["scan", "--format", "csv", "--threads", "2", SMALL_SCAN[0], SMALL_SCAN[1], SMALL_SCAN[2], SMALL_SCAN[3]],
    ] {
        assert_eq!(stdout(&args), stdout(&args), "{args:?}");
    }
    let single = stdout(&["scan", "--threads", "1", SMALL_SCAN[0], SMALL_SCAN[1], SMALL_SCAN[2], SMALL_SCAN[3]]);
    let env = bin()
        .args(["scan", SMALL_SCAN[0], SMALL_SCAN[1], SMALL_SCAN[2], SMALL_SCAN[3]])
        .env("SPINLOCK_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(single.as_bytes(), env.stdout.as_slice());
}

#[test]
fn periodic_circular_case_is_identically_zero() {
    let sys = r#"system={"e":0,"a":5,"C1":0.5,"lambda1":0.1,"lambda2":0.1,"dhat1":0.01,"qhat1":0.01}"#;
    let v: serde_json::Value = serde_json::from_str(&stdout(&["periodic", "--set", sys])).unwrap();
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 129);
    for s in samples {
        for k in ["theta", "theta_dot"] {
            for x in s[k].as_array().unwrap() {
                assert_eq!(x.as_f64().unwrap(), 0.0);
            }
        }
    }
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
    let csv = stdout(&["periodic", "--set", sys, "--format", "csv"]);
    assert_eq!(csv.lines().count(), 130);
}

#[test]
fn pluto_charon_conditions_all_pass() {
    let csv = stdout(&["conditions", "--system", data("pluto_charon.json").to_str().unwrap(), "--format", "csv"]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("true")), "{csv}");
}

#[test]
fn svg_is_well_formed_with_one_cell_per_point() {
    let svg = stdout(&["scan", "--format", "svg", SMALL_SCAN[0], SMALL_SCAN[1], SMALL_SCAN[2], SMALL_SCAN[3]]);
    assert_eq!(svg.matches("<title>").count(), 30);
    let periodic = stdout(&["periodic", "--format", "svg", "--system", data("triaxial_pair.json").to_str().unwrap()]);
    assert!(periodic.contains("<polyline"));
    if !python_has("xml.etree.ElementTree") {
        eprintln!("python3 not found; XML parse skipped");
        return;
    }
    for doc in [svg, periodic] {
        let out = Command::new("python3")
            .args(["-c", "import sys, xml.etree.ElementTree as E; E.fromstring(sys.stdin.read())"])
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::piped())
            .spawn()
            .and_then(|mut c| {
                use std::io::Write;
                c.stdin.take().unwrap().write_all(doc.as_bytes())?;
                c.wait_with_output()
            })
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn precedence_flags_over_set_over_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "scan", "threads": 5, "scan": {"n_e": 7, "qhat": 0.1}, "output": {"format": "csv"}}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["--config", c, "--set", "scan.n_e=9", "--threads", "2", "--show-config"])).unwrap();
    assert_eq!(v["command"], "scan");
    assert_eq!(v["scan"]["n_e"], 9);
    assert_eq!(v["scan"]["qhat"], 0.1);
    assert_eq!(v["scan"]["n_lambda"], 100);
    assert_eq!(v["threads"], 2);
    assert_eq!(v["output"]["format"], "csv");
    let d: serde_json::Value = serde_json::from_str(&stdout(&["--show-config"])).unwrap();
    assert_eq!(d["periodic"]["samples"], 129);
    assert_eq!(d["solver"]["rel_tol"], 1e-11);
}

#[test]
fn relative_system_path_resolves_against_config() {
    let out = stdout(&["--config", data("pluto_charon_damped.json").to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.lines().count(), 5);
}
