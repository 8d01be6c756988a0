use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pulsefront")).args(args).output().unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("pulsefront-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const ZEROS: &str = r#"
experiment = "zeros-audit"
L = [8]
[medium]
kind = "cubic"
b = { mean = 0.25, sin = [0.1] }
[params]
delta_fractions = [1.0]
checkpoints = 4
half_length = 40.0
zeros_t_end = 10.0
"#;

#[test]
fn validate_passes_good_media() {
    let d = scratch_dir("validate-ok");
    let cfg = write(&d, "c.toml", ZEROS);
    let out = bin(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("PASS medium: A1=true A2=true A3=true"), "{s}");
}

#[test]
fn validate_flags_negative_mass() {
    let d = scratch_dir("validate-fail");
    let cfg = write(&d, "c.toml", "experiment = \"speed-sweep\"\nL = [16]\n[medium]\nkind = \"cubic\"\nb = 0.75\n");
    let out = bin(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("A3=false"));
}

#[test]
fn errors_exit_with_two() {
    let d = scratch_dir("errors");
    let missing = d.join("missing.toml");
    assert_eq!(bin(&["validate", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write(&d, "bad.toml", "experiment = \"speed-sweep\"\nL = [16]\n");
    let out = bin(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn run_writes_tables() {
    let d = scratch_dir("run");
    let cfg = write(&d, "c.toml", ZEROS);
    let out_dir = d.join("out");
    let out = bin(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--jobs", "2"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().next().unwrap().starts_with("PASS row 0: medium=medium L=8"), "{stdout}");
    for ext in ["csv", "json", "dat"] {
        assert!(out_dir.join(format!("zeros-audit.{ext}")).is_file(), "{ext}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("zeros-audit.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["reports"][0]["entries"][0]["word"], "+-+");
}

#[test]
fn experiment_override_is_applied() {
    let d = scratch_dir("override");
    let cfg = write(&d, "c.toml", ZEROS);
    let out = bin(&["run", cfg.to_str().unwrap(), "--experiment", "warp"]);
    assert_eq!(out.status.code(), Some(2));
}
