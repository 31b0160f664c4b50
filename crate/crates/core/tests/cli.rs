use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn seora(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seora"))
        .args(args)
        .env_remove("SEORA_CONFIG")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes_for_clean_dirty_and_malformed() {
    assert_eq!(seora(&["check", path(&fixture("clean.yaml"))]).status.code(), Some(0));
    assert_eq!(seora(&["check", path(&fixture("dirty.yaml")), "--fail-on", "high"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.yaml");
    std::fs::write(&bad, "openapi: 3.1.0\npaths: [\n").unwrap();
    let out = seora(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn json_output_is_byte_stable() {
    let dirty = fixture("dirty.yaml");
    let a = seora(&["check", path(&dirty), "--format", "json"]);
    let b = seora(&["check", path(&dirty), "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(parsed["report_version"], "1");
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(seora(&["check"]).status.code(), Some(2));
    assert_eq!(seora(&["check", path(&fixture("clean.yaml")), "--fail-on", "severe"]).status.code(), Some(2));
    assert_eq!(seora(&["check", path(&fixture("clean.yaml")), "--disable", "XXX-999"]).status.code(), Some(2));
    assert_eq!(seora(&["check", "/nonexistent/spec.yaml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.yaml");
    std::fs::write(&config, "disabled_rules: [NOPE-1]\n").unwrap();
    let out = seora(&["check", path(&fixture("clean.yaml")), "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fail_on_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("low.yaml");
    let clean = std::fs::read_to_string(fixture("clean.yaml")).unwrap();
    std::fs::write(&spec, clean.replacen("description:", "x-description:", 1)).unwrap();
    let spec = spec.to_str().unwrap();
    let report = seora(&["check", spec, "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_eq!(parsed["counts"], serde_json::json!({"high": 0, "medium": 0, "low": 1}));
    assert_eq!(report.status.code(), Some(0));
    assert_eq!(seora(&["check", spec, "--fail-on", "medium"]).status.code(), Some(0));
    assert_eq!(seora(&["check", spec, "--fail-on", "low"]).status.code(), Some(1));
    assert_eq!(seora(&["check", spec, "--fail-on", "low", "--disable", "DOC-004"]).status.code(), Some(0));
}

#[test]
fn flags_beat_env_and_enable_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("seora.yaml");
    std::fs::write(&config, "disabled_rules: [URI-001, URI-002, HTTP-001]\n").unwrap();
    let dirty = fixture("dirty.yaml");
    let run = |extra: &[&str], env: Option<&PathBuf>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_seora"));
        cmd.args(["check", path(&dirty), "--format", "json"]).args(extra).env_remove("SEORA_CONFIG");
        if let Some(env) = env {
            cmd.env("SEORA_CONFIG", env);
        }
        let out = cmd.output().unwrap();
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()["suppressed"].as_u64().unwrap()
    };
    assert_eq!(run(&[], None), 0);
    assert_eq!(run(&[], Some(&config)), 3);
    assert_eq!(run(&["--enable", "URI-001"], Some(&config)), 2);
    let empty = dir.path().join("empty.yaml");
    std::fs::write(&empty, "{}\n").unwrap();
    assert_eq!(run(&["--config", empty.to_str().unwrap()], Some(&config)), 0);
}

#[test]
fn out_file_rules_and_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let run = seora(&["check", path(&fixture("dirty.yaml")), "--out", out.to_str().unwrap()]);
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("/Users/\n  [HIGH] HTTP-001 GET"));
    assert!(text.contains("  [HIGH] URI-001 — /Users/ ends with a slash"));

    let rules = seora(&["rules", "--format", "json"]);
    let rules: Vec<serde_json::Value> = serde_json::from_slice(&rules.stdout).unwrap();
    assert_eq!(rules.len(), 34);

    let tree = seora(&["tree", path(&fixture("instances.yaml"))]);
    assert_eq!(tree.stdout, std::fs::read(fixture("instances.tree.json")).unwrap());
}

#[test]
fn serve_refuses_corrupt_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    std::fs::write(&state, "not json").unwrap();
    let out = seora(&["serve", "--port", "0", "--state", state.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state.json"));
}
