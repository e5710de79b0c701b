//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shifted-funk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn phantom_list_names_every_kind() {
    let o = run(&["phantom", "list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for kind in ["constant", "coordinate", "harmonic", "gaussian_bump", "exp_linear", "mixed_quadratic", "a_odd", "a_even"] {
        assert!(text.contains(kind), "missing {kind}");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();

    let cfg = write_config(tmp.path(), "exterior.json", r#"{"a": [1.0, 0.0, 0.0], "phantom": {"kind": "constant", "value": 1.0}}"#);
    assert_eq!(run(&["forward", "--config", &cfg, "--out", out]).status.code(), Some(2));

    let cfg = write_config(tmp.path(), "unknown.json", r#"{"a": [0.0, 0.0, 0.0], "colour": 3}"#);
    assert_eq!(run(&["forward", "--config", &cfg, "--out", out]).status.code(), Some(2));

    let cfg = write_config(tmp.path(), "bad_phantom.json", r#"{"phantom": {"kind": "teapot"}}"#);
    assert_eq!(run(&["forward", "--config", &cfg, "--out", out]).status.code(), Some(2));

    let missing = tmp.path().join("nope.json");
    assert_eq!(run(&["forward", "--config", missing.to_str().unwrap(), "--out", out]).status.code(), Some(4));

    // a near-singular harmonic fit: degree far above what the plane count supports
    let cfg = write_config(
        tmp.path(),
        "ill.json",
        r#"{"a": [0.2, 0.0, 0.0], "phantom": {"kind": "mixed_quadratic"}, "plane_count": 20, "degree_max": 24, "grid_resolution": 4, "section_resolution": 16}"#,
    );
    assert_eq!(run(&["invert-single", "--config", &cfg, "--out", out]).status.code(), Some(3));
}

#[test]
fn forward_writes_constant_field() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"a": [0.0, 0.0, 0.0], "phantom": {"kind": "constant", "value": 1.0}, "plane_count": 10, "section_resolution": 16}"#,
    );
    let o = run(&["forward", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("forward.csv")).unwrap();
    let last = r.headers().unwrap().len() - 1;
    let mut rows = 0;
    for rec in r.records() {
        let v: f64 = rec.unwrap()[last].parse().unwrap();
        assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 10);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("forward.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "forward");
}

#[test]
fn sequential_and_parallel_outputs_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "r.json",
        r#"{"a": [0.25, 0.0, 0.0], "b": [0.5, 0.0, 0.0], "phantom": {"kind": "mixed_quadratic"}, "plane_count": 400, "degree_max": 12, "grid_resolution": 8, "section_resolution": 32, "m_max": 20}"#,
    );
    let one = tmp.path().join("one");
    let two = tmp.path().join("two");
    assert!(run(&["reconstruct-two", "--config", &cfg, "--out", one.to_str().unwrap(), "--threads", "1"]).status.success());
    assert!(run(&["reconstruct-two", "--config", &cfg, "--out", two.to_str().unwrap(), "--threads", "2"]).status.success());
    for file in ["reconstruction.csv", "convergence.csv"] {
        assert_eq!(std::fs::read(one.join(file)).unwrap(), std::fs::read(two.join(file)).unwrap(), "{file}");
    }
}
