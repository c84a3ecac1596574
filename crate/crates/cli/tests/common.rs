#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

pub fn carleman(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carleman"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CARLEMAN_WORKERS")
        .output()
        .expect("binary runs")
}

pub fn summary(out: &Path) -> Value {
    let text = std::fs::read_to_string(out.join("summary.json")).expect("summary.json");
    serde_json::from_str(&text).expect("valid json")
}

/// Every check of every stage in a summary.
pub fn checks(summary: &Value) -> Vec<Value> {
    summary["stages"]
        .as_array()
        .expect("stages")
        .iter()
        .flat_map(|s| s["checks"].as_array().expect("checks").clone())
        .collect()
}
