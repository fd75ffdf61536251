use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bps_core::scenario::ScenarioConfig;
use tempfile::TempDir;

fn bps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bps")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_config(root: &Path) -> PathBuf {
    let path = root.join("small.toml");
    std::fs::write(&path, ScenarioConfig::desk(2, 50.0).to_toml_string()).unwrap();
    path
}

fn generated(root: &TempDir) -> PathBuf {
    let config = small_config(root.path());
    let out = root.path().join("scenario");
    let o = bps(&["generate", "--config", s(&config), "--seed", "3", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn read(p: PathBuf) -> Vec<u8> {
    std::fs::read(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn generate_is_reproducible() {
    let root = TempDir::new().unwrap();
    let a = generated(&root);
    let config = root.path().join("small.toml");
    let b = root.path().join("again");
    assert!(bps(&["generate", "--config", s(&config), "--seed", "3", "--out", s(&b)]).status.success());
    for f in ["tiles.csv", "locations.csv", "scenario.toml", "attenuation.csv"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f}");
    }
}

#[test]
fn unknown_config_key_is_rejected_by_name() {
    let root = TempDir::new().unwrap();
    let bad = root.path().join("bad.toml");
    let text = format!("bogus_knob = 3\n{}", ScenarioConfig::desk(2, 50.0).to_toml_string());
    std::fs::write(&bad, text).unwrap();
    let o = bps(&["generate", "--config", s(&bad), "--out", s(&root.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus_knob"));
}

#[test]
fn play_writes_strategy_and_trace() {
    let root = TempDir::new().unwrap();
    let scenario = generated(&root);
    let out = root.path().join("play");
    let o = bps(&["play", s(&scenario), "--carriers", "1", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("converged = true"));
    assert!(out.join("strategy.csv").exists());
    assert!(out.join("trace.csv").exists());

    let fixed = root.path().join("min");
    assert!(bps(&["play", s(&scenario), "--policy", "min", "--out", s(&fixed)]).status.success());
    assert!(fixed.join("strategy.csv").exists());
    assert!(!fixed.join("trace.csv").exists());
}

#[test]
fn simulate_reports_each_requested_policy() {
    let root = TempDir::new().unwrap();
    let scenario = generated(&root);
    let out = root.path().join("sim");
    let o = bps(&[
        "simulate", s(&scenario), "--policy", "bps,max,min", "--duration-s", "0.5", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(read(out.join("metrics.csv"))).unwrap();
    for p in ["bps", "max", "min"] {
        assert!(text.contains(&format!("\n{p},")), "{p}");
    }
    assert!(!text.contains("\neicic,"));

    let zero = bps(&["simulate", s(&scenario), "--duration-s", "0", "--out", s(&root.path().join("z"))]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let root = TempDir::new().unwrap();
    let out = root.path().join("v");
    let o = bps(&["verify", "closedform", "--cases", "20", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(out.join("verify.csv")).starts_with(b"suite,check,case,value,limit,pass,enforced"));

    let o = bps(&["verify", "nonsense", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_reproduces_outputs() {
    let root = TempDir::new().unwrap();
    let scenario = generated(&root);
    let out = root.path().join("play");
    assert!(bps(&["play", s(&scenario), "--out", s(&out)]).status.success());
    let again = root.path().join("replayed");
    let o = bps(&["replay", s(&out.join("manifest.txt")), "--out", s(&again)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["strategy.csv", "trace.csv"] {
        assert_eq!(read(out.join(f)), read(again.join(f)), "{f}");
    }
}

#[test]
fn missing_scenario_directory_is_an_io_error() {
    let root = TempDir::new().unwrap();
    let o = bps(&["play", s(&root.path().join("nowhere")), "--out", s(&root.path().join("p"))]);
    assert_eq!(o.status.code(), Some(3));
}
