use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use symcap::Error;
use symcap_cli::CliError;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symcap")).args(args).current_dir(dir).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn capacity_of_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["capacity", "--domain", "annulus_disk", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["version"], symcap::VERSION);
    let r = &v["result"];
    assert_eq!(r["lower"].as_f64().unwrap(), 1.0);
    assert!(r["upper"].as_f64().unwrap() <= 1.0 + 1e-3);
    assert!(r["certificates"].as_array().unwrap().len() >= 2);
}

#[test]
fn billiard_writes_radial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["billiard", "--table", "annulus", "--delta", "0", "--k-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["action"].as_f64().unwrap(), 2.0);
    let csv = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["index,x,y,component_label", "0,1,0,outer", "1,0,0,obstacle0"]);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = run(dir.path(), &["--out", name, "report"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["pass"] == true));
    let cube = rows.iter().find(|r| r["name"] == "punctured_cube_product").unwrap();
    assert_eq!(
        (cube["expected"].as_f64(), cube["lower"].as_f64(), cube["a_min"].as_f64()),
        (Some(2.0), Some(2.0), Some(2.0))
    );
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"kind": "cube", "dim": 2"#).unwrap();
    assert_eq!(run(dir.path(), &["volume", "--body", "bad.json"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["volume", "--body", "missing.json"]).status.code(), Some(2));
    std::fs::write(
        dir.path().join("dom.json"),
        r#"{"product": {"position": {"kind": "torus", "dim": 2}, "momentum": {"kind": "ball", "dim": 2}}}"#,
    )
    .unwrap();
    assert_eq!(run(dir.path(), &["capacity", "--domain-file", "dom.json"]).status.code(), Some(2));
    std::fs::write(dir.path().join("neg.json"), r#"{"kind": "ball", "dim": 2, "params": [-1]}"#).unwrap();
    assert_eq!(run(dir.path(), &["volume", "--body", "neg.json"]).status.code(), Some(2));
    let out = run(dir.path(), &["--out", "no/such/dir/r.json", "capacity", "disk_disk"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(CliError::Core(Error::Consistency { message: "x".into(), dump: String::new() }).exit_code(), 3);
    assert_eq!(CliError::Core(Error::Parse("x".into())).exit_code(), 2);
    assert_eq!(CliError::Core(Error::Rejected("x".into())).exit_code(), 1);
}

#[test]
fn volume_and_cylinder() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cube.json"), r#"{"kind": "cube", "dim": 2, "params": [1, 1]}"#).unwrap();
    let out = run(dir.path(), &["--mc-samples", "100000", "volume", "--body", "cube.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["exact"].as_f64(), Some(4.0));
    let out = run(dir.path(), &["cylinder", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["g"].as_f64(), Some(4.0));
    assert!(r["lower_cert"].is_object() && r["upper_cert"].is_object() && r["defects"]["f"].is_object());
}

#[test]
fn every_map_verifies() {
    let dir = tempfile::tempdir().unwrap();
    for m in [
        "annulus-squeeze",
        "factor-swap",
        "rect-to-disk",
        "sigma",
        "biran-cube",
        "cylinder-f",
        "cylinder-squeeze",
        "camel",
    ] {
        let out = run(dir.path(), &["--samples", "4000", "verify-map", "--map", m, "--eps", "0.05"]);
        assert_eq!(out.status.code(), Some(0), "{m}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn header_only_csv_for_no_trajectories() {
    assert_eq!(symcap::io::trajectories_csv::<f64>(3, &[]), "index,x,y,z,component_label\n");
}
