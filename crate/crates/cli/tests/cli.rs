use std::process::{Command, Output};

use serde_json::Value;

fn ghzx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghzx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn labels(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn plan_maximal_n7() {
    let out = ghzx(&["plan", "-n", "7", "--max"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["config"]["command"], "plan");
    assert_eq!(labels(&doc["plan"]["vg"]), [1, 2, 4, 6, 7]);
    assert_eq!(doc["plan"]["basis"], serde_json::json!({"3": "X", "5": "X"}));
}

#[test]
fn plan_reports_flanked_island() {
    let out = ghzx(&["plan", "-n", "7", "--vg", "1,3,4,6"]);
    assert_eq!(code(&out), 2);
    let doc = json(&out);
    assert_eq!(doc["plan"]["feasible"], false);
    assert_eq!(doc["plan"]["reason"], "2-island {3,4} flanked on both sides");
    assert!(String::from_utf8_lossy(&out.stderr).contains("flanked"));
}

#[test]
fn plan_three_qubits_measures_nothing() {
    let doc = json(&ghzx(&["plan", "-n", "3", "--max"]));
    assert_eq!(labels(&doc["plan"]["vg"]), [1, 2, 3]);
    assert_eq!(doc["plan"]["basis"], serde_json::json!({}));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&ghzx(&["plan", "-n", "7"])), 1);
    assert_eq!(code(&ghzx(&["plan", "-n", "7", "--vg", "9"])), 1);
    assert_eq!(code(&ghzx(&["extract", "-n", "7", "--max"])), 1);
    assert_eq!(code(&ghzx(&["extract", "-n", "7", "--max", "--force-outcomes", "3:-1"])), 1);
    assert_eq!(code(&ghzx(&["fidelity", "-n", "6", "--seed", "1"])), 1);
    assert_eq!(code(&ghzx(&["frobnicate"])), 1);
    assert_eq!(code(&ghzx(&["--help"])), 0);
}

#[test]
fn enumerate_counts() {
    let doc = json(&ghzx(&["enumerate", "-n", "7", "-m", "4"]));
    assert_eq!(doc["count"], 15);
    let doc = json(&ghzx(&["enumerate", "-n", "7", "-m", "6"]));
    assert_eq!(doc["count"], 0);
    let doc = json(&ghzx(&["enumerate", "-n", "5", "-m", "4"]));
    assert!(doc["targets"].as_array().unwrap().iter().any(|t| labels(t) == [1, 2, 4, 5]));
    let doc = json(&ghzx(&["enumerate", "-n", "7", "-m", "5"]));
    assert_eq!(doc["targets"], serde_json::json!([[1, 2, 4, 6, 7]]));
}

#[test]
fn extract_all_plus_needs_boundary_hadamards_only() {
    let out = ghzx(&["extract", "-n", "7", "--max", "--force-outcomes", "3:+1,5:+1"]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["report"];
    assert_eq!(r["verified"], true);
    assert_eq!(
        r["corrections"],
        serde_json::json!({"1": "H", "2": "I", "4": "I", "6": "I", "7": "H"})
    );
}

#[test]
fn extract_minus_outcome_adds_pauli_flips() {
    let r = &json(&ghzx(&["extract", "-n", "7", "--max", "--force-outcomes", "3:-1,5:+1"]))["report"];
    assert_eq!(r["verified"], true);
    assert_eq!(r["record"]["outcomes"]["3"], -1);
    let c = r["corrections"].as_object().unwrap();
    assert!(c.values().any(|g| g.as_str().unwrap().contains('X')), "{c:?}");
}

#[test]
fn extract_trimming_the_end_leaves_a_shorter_line() {
    for o in ["4:+1", "4:-1"] {
        let r = &json(&ghzx(&["extract", "-n", "4", "--vg", "1,2,3", "--force-outcomes", o]))["report"];
        assert_eq!(r["plan"]["basis"], serde_json::json!({"4": "Z"}));
        assert_eq!(r["verified"], true);
    }
}

#[test]
fn extract_random_outcomes_verify() {
    for seed in 0..20 {
        let s = seed.to_string();
        let out = ghzx(&["extract", "-n", "8", "--vg", "1,2,4,7,8", "--seed", &s]);
        assert_eq!(code(&out), 0);
        assert_eq!(json(&out)["report"]["verified"], true);
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = ghzx(&["extract", "-n", "11", "--max", "--seed", "42"]);
    let b = ghzx(&["extract", "-n", "11", "--max", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let args = ["fidelity", "--family", "ghz", "-n", "9", "--seed", "7", "-p", "0.05", "-q", "0.01", "--shots", "5000"];
    assert_eq!(ghzx(&args).stdout, ghzx(&args).stdout);
}

#[test]
fn noiseless_fidelity_is_calibrated() {
    for family in ["cluster", "ghz"] {
        let out = ghzx(&["fidelity", "--family", family, "-n", "7", "--seed", "1"]);
        assert_eq!(code(&out), 0);
        let doc = json(&out);
        assert_eq!(doc["config"]["shots"], 32000);
        let b = doc["report"]["bound"].as_f64().unwrap();
        assert!((0.99..=1.0).contains(&b), "{family}: {b}");
    }
}

#[test]
fn fidelity_variant_and_monotone_sweep() {
    let bound = |p: &str, variant: &str| {
        let doc = json(&ghzx(&["fidelity", "-n", "5", "--seed", "3", "-p", p, "--shots", "8000", "--variant", variant]));
        (doc["selected"]["bound"].as_f64().unwrap(), doc["selected"]["se"].as_f64().unwrap())
    };
    let grid = ["0", "0.05", "0.1", "0.15", "0.2"];
    let sweep: Vec<(f64, f64)> = grid.iter().map(|p| bound(p, "identity")).collect();
    for w in sweep.windows(2) {
        assert!(w[1].0 <= w[0].0 + 3.0 * w[0].1.hypot(w[1].1), "{sweep:?}");
    }
    let (ni, _) = bound("0.1", "no-identity");
    assert!(ni < sweep[2].0);
}

#[test]
fn fidelity_ingests_dumped_tables() {
    let dir = std::env::temp_dir().join(format!("ghzx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let z = dir.join("z.csv");
    let x = dir.join("x.csv");
    let (zs, xs) = (z.to_str().unwrap(), x.to_str().unwrap());
    let sampled = json(&ghzx(&[
        "fidelity", "--family", "ghz", "-n", "7", "--seed", "5", "-p", "0.1", "--shots", "3000", "--dump", zs, xs,
    ]));
    let ingested = json(&ghzx(&["fidelity", "--family", "ghz", "-n", "7", "--ingest", zs, xs]));
    assert_eq!(sampled["report"], ingested["report"]);
    assert!(std::fs::read_to_string(&z).unwrap().starts_with("1,2,4,6,7\n"));

    std::fs::write(&z, "1,2,3\n1,1,1\n").unwrap();
    let bad = ghzx(&["fidelity", "--family", "ghz", "-n", "7", "--ingest", zs, xs]);
    assert_eq!(code(&bad), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
