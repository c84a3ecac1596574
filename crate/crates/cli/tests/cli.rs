mod common;

use std::fs;
use std::process::Command;

use common::{carleman, checks, summary};
use tempfile::tempdir;

#[test]
fn identities_example_passes() {
    let dir = tempdir().unwrap();
    let o = carleman(dir.path(), &["verify-identities", "--ids", "as0,1208-2b", "--trials", "50", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path());
    assert_eq!(s["pass"], true);
    let cs = checks(&s);
    assert_eq!(cs.len(), 2);
    for c in cs {
        assert!(c["value"].as_f64().unwrap() <= 1e-9, "{c}");
    }
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("id,max_residual"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn manifest_records_resolved_run() {
    let dir = tempdir().unwrap();
    let o = carleman(dir.path(), &["hum-control", "--seed", "7", "--workers", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "hum-control");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["workers"], 1);
    assert_eq!(m["config"]["seed"], 7);
    assert_eq!(m["config"]["carleman_beta_neg"]["sweep"]["seed"], 7);
    assert_eq!(m["stages"], serde_json::json!(["hum-control"]));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempdir().unwrap();
    let o = carleman(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"seed": 1, "no_such_key": 0}"#).unwrap();
    let o = carleman(dir.path(), &["hum-control", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&cfg, r#"{"control": {"problem": {"epsilon": -1.0}}}"#).unwrap();
    let o = carleman(dir.path(), &["hum-control", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let o = carleman(dir.path(), &["verify-identities", "--ids", "not-an-identity"]);
    assert_eq!(o.status.code(), Some(2));

    let o = carleman(dir.path(), &["carleman-sweep", "--lambda", "8,9"]);
    assert_eq!(o.status.code(), Some(2));

    let o = carleman(dir.path(), &["plate-decay", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_worker_env_is_a_config_error() {
    let dir = tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_carleman"))
        .args(["hum-control", "--out"])
        .arg(dir.path())
        .env("CARLEMAN_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_exits_1() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // An unreachable target with a tiny iteration budget.
    fs::write(&cfg, r#"{"control": {"target": 1e-30, "problem": {"max_iter": 2}}}"#).unwrap();
    let o = carleman(dir.path(), &["hum-control", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path());
    assert_eq!(s["pass"], false);
}

#[test]
fn sweep_rows_are_lambdas_times_fields() {
    let dir = tempdir().unwrap();
    let o = carleman(
        dir.path(),
        &["carleman-sweep", "--regime", "beta-neg", "--lambda", "8,16,32,64", "--fields", "6", "--panels", "8"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,mu,field_id,lhs,rhs,ratio"));
    assert_eq!(lines.count(), 4 * 6);
}

#[test]
fn results_are_reproducible_across_worker_counts() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let args = ["plate-resolvent", "--modes", "16", "--samples", "20", "--seed", "42"];
    let oa = carleman(a.path(), &[&args[..], &["--workers", "1"]].concat());
    let ob = carleman(b.path(), &[&args[..], &["--workers", "0"]].concat());
    assert_eq!(oa.status.code(), Some(0), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(ob.status.code(), Some(0));
    let ra = fs::read(a.path().join("results.csv")).unwrap();
    let rb = fs::read(b.path().join("results.csv")).unwrap();
    assert_eq!(ra, rb);
}
