//! Process-level contract: exit codes, report schema round trips, format
//! switches, config loading, and file-based inputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn weightlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weightlab"))
        .args(args)
        .env_remove("WEIGHTLAB_CONFIG")
        .output()
        .expect("spawning weightlab")
}

fn tmp_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weightlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn check_emits_valid_json_report() {
    let out = weightlab(&["check", "--seq", "gevrey:1", "--cond", "lc,mg,fdb"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["command"], "check");
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    for r in results {
        assert_eq!(r["verdict"]["trend"], "holds");
    }
}

#[test]
fn usage_error_exits_64() {
    let out = weightlab(&["check", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(64));

    let out = weightlab(&["check", "--seq", "gevrey:1", "--cond", "bogus"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn validation_error_exits_2() {
    let out = weightlab(&["check", "--seq", "no_such_catalog_name"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schema_error_exits_65() {
    let dir = tmp_dir();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = weightlab(&["check", "--seq", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));

    // Valid JSON with a missing field is also a schema error.
    let path = dir.join("missing.json");
    std::fs::write(&path, "{\"label\": \"x\"}").unwrap();
    let out = weightlab(&["check", "--seq", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn invalid_sequence_file_exits_2() {
    let dir = tmp_dir();
    let path = dir.join("short.json");
    std::fs::write(&path, "{\"label\": \"x\", \"log_values\": [0.0, 1.0]}").unwrap();
    let out = weightlab(&["check", "--seq", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_flag_escalates_inconclusive_only() {
    // A held verdict does not trip --strict.
    let out = weightlab(&["--strict", "check", "--seq", "gevrey:1", "--cond", "lc"]);
    assert!(out.status.success());
}

#[test]
fn export_round_trips_through_file_input() {
    let dir = tmp_dir();
    let path = dir.join("seq.json");
    let out = weightlab(&["export", "--seq", "gevrey:1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let out = weightlab(&["check", "--seq", path.to_str().unwrap(), "--cond", "lc"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"][0]["verdict"]["trend"], "holds");
}

#[test]
fn matrix_export_and_check_round_trip() {
    let dir = tmp_dir();
    let path = dir.join("matrix.json");
    let out = weightlab(&[
        "--lambda-grid",
        "1,2,3",
        "--n",
        "32",
        "export",
        "--matrix",
        "gevrey",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = weightlab(&["matrix-check", "--cond", "strict", "--flavor", "roumieu", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"][0]["matrix_verdict"]["verdict"]["trend"], "holds");
}

#[test]
fn csv_format_flattens_verdicts() {
    let out = weightlab(&["--format", "csv", "check", "--seq", "factorial", "--cond", "mg,dc"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "result,condition,at_truncation,trend,constant,witness"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn config_file_overrides_defaults_and_flags_win() {
    let dir = tmp_dir();
    let path = dir.join("weightlab.conf");
    std::fs::write(&path, "n = 16\ntol_trend = 0.1\n").unwrap();
    let out = weightlab(&["--config", path.to_str().unwrap(), "check", "--seq", "factorial", "--cond", "lc"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["n"], 16);
    assert_eq!(report["config"]["tol_trend"], 0.1);

    let out = weightlab(&[
        "--config",
        path.to_str().unwrap(),
        "--n",
        "24",
        "check",
        "--seq",
        "factorial",
        "--cond",
        "lc",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["n"], 24);
}

#[test]
fn env_var_config_is_honored() {
    let dir = tmp_dir();
    let path = dir.join("env.conf");
    std::fs::write(&path, "n = 12\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_weightlab"))
        .args(["check", "--seq", "factorial", "--cond", "lc"])
        .env("WEIGHTLAB_CONFIG", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["n"], 12);
}

#[test]
fn omega_check_reports_condition_map() {
    let out = weightlab(&["omega-check", "--omega", "log_power:2"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let map = &report["results"][0]["map"];
    assert_eq!(map["omega1"]["trend"], "holds");
    assert_eq!(map["omega6"]["trend"], "fails");
}

#[test]
fn custom_table_weight_from_csv() {
    let dir = tmp_dir();
    let path = dir.join("omega.csv");
    let mut body = String::from("t,omega\n");
    for i in 0..256 {
        let t = 1.0 + (i as f64) * 40.0;
        body.push_str(&format!("{t},{}\n", t.sqrt()));
    }
    std::fs::write(&path, body).unwrap();
    let out = weightlab(&["omega-check", "--omega", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // sqrt grows sublinearly: omega5 holds; shifted so omega(1) = 0.
    assert_eq!(report["results"].as_array().unwrap().len(), 2);
}

#[test]
fn witness_family_subcommand() {
    let out = weightlab(&["--n", "4096", "witness", "family", "--seq", "recip:factorial"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let families = report["results"][0]["families"].as_array().unwrap();
    let roumieu = families
        .iter()
        .find(|t| t["family"] == "RRoumieu")
        .unwrap();
    assert_eq!(roumieu["verdict"]["trend"], "holds");
}

#[test]
fn witness_char_derivs_subcommand() {
    let out = weightlab(&["--n", "128", "witness", "char-derivs", "--seq", "gevrey:1", "--j-max", "16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let values = report["results"][0]["sequence"]["log_values"].as_array().unwrap();
    assert_eq!(values.len(), 17);
}

#[test]
fn witness_blocks_subcommand() {
    let out = weightlab(&[
        "--lambda-grid",
        "1,2",
        "witness",
        "blocks",
        "--matrix",
        "gevrey",
        "--b",
        "gevrey:3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let blocks = &report["results"][0]["blocks"];
    assert!(blocks["blocks_completed"].as_u64().unwrap() >= 1);
}

#[test]
fn fdb_subcommand_prints_witness_partitions() {
    let out = weightlab(&["fdb", "gevrey:1", "--max-k", "6"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"fdb"));
    assert!(names.contains(&"argmax[6]"));
}
