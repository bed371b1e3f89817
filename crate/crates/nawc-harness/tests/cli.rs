use std::path::Path;
use std::process::{Command, Output};

use nawc_harness::checks;

const CONFIG: &str = r#"
[[scenario]]
name = "algebra"
module = "algebra"
m = 2

[[scenario]]
name = "wedge"
module = "wedge"
coupling = { kind = "family", y = [0.2, 0.1, 1.0, -0.5] }
theta = { lambda = 0.4 }
wedge = { points = 400 }
"#;

fn nawc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nawc")).args(args).env("NAWC_LOG", "off").output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_checks_prints_every_registered_id() {
    let out = nawc(&["list-checks"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), checks::REGISTRY.len());
    let fock = String::from_utf8(nawc(&["list-checks", "--module", "fock"]).stdout).unwrap();
    assert!(fock.lines().all(|l| l.starts_with("fock.")));
    assert_eq!(nawc(&["list-checks", "--module", "nope"]).status.code(), Some(2));
}

#[test]
fn explain_known_and_unknown() {
    let out = nawc(&["explain", "wedge.locality"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("rationale"));
    assert_eq!(nawc(&["explain", "wedge.nothing"]).status.code(), Some(2));
}

#[test]
fn run_writes_all_formats_with_registry_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_dir = dir.path().join("out");
    let out = nawc(&["run", &cfg, "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["report.json", "timing.json", "report.txt", "kernel_wedge.csv"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(out_dir.join("kernel_wedge.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("z0,z1,r,re,im"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(v["summary"]["total"].as_u64(), Some(records.len() as u64));
    for r in records {
        let spec = checks::find(r["id"].as_str().unwrap()).expect("registered id");
        assert_eq!(r["anchor"].as_str(), Some(spec.anchor));
        assert!(r.get("wall_ms").is_none());
    }
}

#[test]
fn json_only_skips_other_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_dir = dir.path().join("out");
    let out = nawc(&["run", &cfg, "--format", "json", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(out_dir.join("report.json").exists());
    assert!(!out_dir.join("report.txt").exists());
    assert!(!out_dir.join("kernel_wedge.csv").exists());
}

#[test]
fn unwritable_out_dir_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = nawc(&["run", &cfg, "--format", "json", "--out-dir", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_inputs_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    assert_eq!(nawc(&["run", missing.to_str().unwrap()]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "[[scenario]]\nname = \"a\"\nmodule = \"algebra\"\nm = 2\nsurprise = 1\n");
    assert_eq!(nawc(&["run", &cfg]).status.code(), Some(2));
    let out = nawc(&["run", &cfg, "--format", "yaml"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn fail_fast_stops_after_first_failure() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[[scenario]]\nname = \"a\"\nmodule = \"algebra\"\nm = 3\ntolerances = { \"algebra.reconstruction\" = 1e-300, \"algebra.jacobi\" = 1e-300 }\n";
    let cfg = write_config(dir.path(), body);
    let out_dir = dir.path().join("out");
    let out = nawc(&["run", &cfg, "--format", "json", "--fail-fast", "--jobs", "1", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(v["records"].as_array().unwrap().len() < checks::for_module(checks::Module::Algebra).count());
}
