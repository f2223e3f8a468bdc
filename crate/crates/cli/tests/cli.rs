use std::path::PathBuf;
use std::process::{Command, Output};

use dpdelta::zariski::Decomposition;

fn catalog() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpdelta"))
        .arg("--catalog")
        .arg(catalog())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_single_case_succeeds() {
    let o = run(&["verify", "--case", "A1-nodal"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("delta=2 OK"));
}

#[test]
fn decompose_json_round_trips() {
    let cfg = catalog().join("a2_nodal/config.json");
    let o = run(&["--json", "decompose", "--config", cfg.to_str().unwrap(), "--flag", "E1"]);
    assert_eq!(o.status.code(), Some(0));
    let d: Decomposition = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(d.flag, "E1");
    assert_eq!(d.tau, dpdelta::r("1"));
    let again = serde_json::to_string_pretty(&d).unwrap();
    assert_eq!(again.trim(), stdout(&o).trim());
}

#[test]
fn s_and_sw_from_a_case() {
    let o = run(&["s", "--case", "A1-nodal", "--flag", "E"]);
    assert_eq!(stdout(&o).trim(), "S(E) = 1/2");
    let o = run(&["sw", "--case", "A1-nodal", "--flag", "E", "--point", "node"]);
    assert!(stdout(&o).trim_end().ends_with("S(W;node) = 1/2"), "{}", stdout(&o));
}

#[test]
fn delta_case_prints_certified_value() {
    let o = run(&["delta-case", "--case", "A7-irreducible"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("delta(A7-irreducible) = 18/17"));
}

#[test]
fn table_lookup_and_bad_input() {
    let o = run(&["table", "--singularities", "A7:red+A1:nodal"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(&["table", "--singularities", "A1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("MISMATCH"));
}

#[test]
fn blowup_writes_a_valid_config() {
    let dir = std::env::temp_dir().join(format!("dpdelta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("blown_up.json");
    let cfg = catalog().join("a4/config.json");
    let o = run(&["blowup", "--config", cfg.to_str().unwrap(), "--point", "E2E3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let loaded = dpdelta::config::load(&out).unwrap();
    assert!(loaded.index_of("E_P").is_ok());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_subcommand_agrees() {
    let o = run(&["oracle", "--case", "D4", "--flag", "E", "--trials", "20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("20/20 agree"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--case", "Z9"]).status.code(), Some(2));
}
