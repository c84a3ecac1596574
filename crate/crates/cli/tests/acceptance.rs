//! Runs `carleman all` twice with seed 42 and prints one line per
//! acceptance criterion.

mod common;

use std::collections::BTreeMap;
use std::fs;

use common::{carleman, checks, summary};
use serde_json::Value;
use tempfile::tempdir;

const TITLES: [&str; 11] = [
    "decomposition exactness",
    "identity catalog",
    "symmetry contract",
    "derivative oracle agreement",
    "Carleman estimate, beta < 0",
    "Carleman estimate, beta = 0",
    "lemma inequality suites",
    "plate conservation and decay",
    "resolvent growth",
    "HUM null control",
    "determinism",
];

/// Checks that fail on the default configuration. Held-out fields violate
/// the fitted gradient-lemma bound at every λ; README documents the numbers.
const KNOWN_FAILURES: [&str; 1] = ["lemma_2_5_stable_from_lambda"];

fn describe(c: &Value) -> String {
    format!(
        "{}={:.3e} ({} {:.3e})",
        c["name"].as_str().unwrap(),
        c["value"].as_f64().unwrap_or(f64::NAN),
        match c["compare"].as_str().unwrap() {
            "at_most" => "<=",
            "at_least" => ">=",
            _ => "flag",
        },
        c["threshold"].as_f64().unwrap_or(f64::NAN),
    )
}

/// Metrics sharing the failing check's prefix, e.g. the per-λ constants
/// and held-out defect counts behind a stability check.
fn context(summary: &Value, check: &str) -> String {
    let prefix = check.split("_stable").next().unwrap();
    summary["stages"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["metrics"].as_array().unwrap().iter())
        .filter(|m| m["name"].as_str().unwrap().starts_with(prefix))
        .map(|m| format!("{}={}", m["name"].as_str().unwrap(), m["value"]))
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn acceptance_criteria() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let oa = carleman(a.path(), &["all", "--seed", "42"]);
    let ob = carleman(b.path(), &["all", "--seed", "42"]);
    let code = oa.status.code();
    assert!(code == Some(0) || code == Some(1), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(code, ob.status.code());

    let s = summary(a.path());
    let mut by_criterion: BTreeMap<u64, Vec<Value>> = BTreeMap::new();
    for c in checks(&s) {
        by_criterion.entry(c["criterion"].as_u64().unwrap()).or_default().push(c);
    }
    let ra = fs::read(a.path().join("results.csv")).unwrap();
    let rb = fs::read(b.path().join("results.csv")).unwrap();
    let identical = ra == rb;

    let mut failing = Vec::new();
    println!();
    for (i, title) in TITLES.iter().enumerate() {
        let n = i as u64 + 1;
        let (pass, detail) = if n == 11 {
            (identical, format!("results.csv {} bytes, identical: {identical}", ra.len()))
        } else {
            let cs = by_criterion.get(&n).unwrap_or_else(|| panic!("no checks for criterion {n}"));
            let bad: Vec<&Value> = cs.iter().filter(|c| c["pass"] != true).collect();
            failing.extend(bad.iter().map(|c| c["name"].as_str().unwrap().to_string()));
            let pass = bad.is_empty();
            let detail = if pass {
                cs.iter().map(describe).collect::<Vec<_>>().join("; ")
            } else {
                bad.iter()
                    .map(|c| format!("{} [{}]", describe(c), context(&s, c["name"].as_str().unwrap())))
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            (pass, detail)
        };
        println!("criterion {n:>2} {:<4} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    assert!(identical, "results.csv differs between runs");
    assert_eq!(code == Some(0), failing.is_empty());
    failing.sort();
    assert_eq!(failing, KNOWN_FAILURES, "unexpected set of failing checks");
}
