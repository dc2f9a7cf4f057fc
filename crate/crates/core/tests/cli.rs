use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-ergodic"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, stdout, _) = run(&full);
    (code, serde_json::from_str(&stdout).expect("valid JSON"))
}

#[test]
fn analyze_examples() {
    let (code, v) = json(&["analyze", "--p", "3", "--n", "2", "--l", "1", "--depth", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["results"]["verdict"]["minimal"], true);

    let (code, out, _) = run(&["analyze", "--p", "3", "--n", "4", "--l", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("minimal: false"));
    assert!(out.contains("invariant balls: B_{1/9}(4)"));

    let (code, _, err) = run(&["analyze", "--p", "2", "--n", "3", "--l", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("odd prime"));
    assert_eq!(run(&["analyze", "--p", "3", "--n", "6", "--l", "1"]).0, 2);
    assert_eq!(run(&["analyze", "--p", "3", "--n", "x", "--l", "1"]).0, 1);
    assert_eq!(run(&["analyze"]).0, 1);
}

#[test]
fn orbit_examples() {
    let (code, v) = json(&["orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "4", "--steps", "6"]);
    assert_eq!(code, 0);
    let avgs = v["results"]["birkhoff_averages"].as_array().unwrap();
    let ball4 = avgs
        .iter()
        .find(|a| a["function"]["kind"] == "ball_indicator" && a["function"]["center"] == 4)
        .unwrap();
    assert_eq!(ball4["time_average"], "1/2");
    let orbit: Vec<u64> = v["results"]["orbit"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().parse::<u64>().unwrap() % 9)
        .collect();
    assert_eq!(orbit, vec![4, 7, 4, 7, 4, 7]);

    let (code, v) = json(&["orbit", "--p", "3", "--n", "4", "--l", "1", "--x0", "4", "--steps", "10"]);
    assert_eq!(code, 0);
    let ball7 = v["results"]["birkhoff_averages"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["function"]["center"] == 7)
        .unwrap()
        .clone();
    assert_eq!(ball7["time_average"], "0");

    assert_eq!(run(&["orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "4", "--steps", "0"]).0, 1);
    assert_eq!(run(&["orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "10", "--steps", "3"]).0, 2);
}

#[test]
fn verify_examples() {
    let (code, v) = json(&["verify", "lemma1", "--p", "3", "--K", "4", "--n-max", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["status"], "PASS");
    assert_eq!(v["results"][0]["digest"].as_str().unwrap().len(), 64);

    let (code, out, _) = run(&["verify", "lemma1", "--p", "2", "--K", "5", "--n-max", "8"]);
    assert_eq!(code, 0);
    assert!(out.contains("n=2: 256 pairs, equality 128, strict 128, equality required: false"));

    assert_eq!(run(&["verify", "minimal", "--p", "3,5,7", "--depth", "3"]).0, 0);
    assert_eq!(run(&["verify", "generation", "--p", "3,5"]).0, 0);
    assert_eq!(run(&["verify", "unique", "--p", "3", "--l", "1", "--depth", "2"]).0, 0);
    assert_eq!(run(&["verify", "log-isometry", "--p", "3", "--K", "4"]).0, 0);
    // p^K above the sweep cap
    assert_eq!(run(&["verify", "lemma1", "--p", "3", "--K", "14"]).0, 2);
    assert_eq!(run(&["verify", "nonsense"]).0, 1);
}

#[test]
fn perturb_examples() {
    let (code, v) = json(&["perturb", "--p", "3", "--n", "2", "--l", "2", "--q", "81"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["congruence"]["holds"], true);

    let (code, v) = json(&["perturb", "--p", "3", "--n", "2", "--l", "1", "--q", "27"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["congruence"]["expected_to_hold"], false);
    assert!(v["results"]["congruence"]["discrepancy_count"].as_u64().unwrap() > 0);
    assert!(v["results"]["invariance"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| i["invariant"] == true));

    let (code, _, err) = run(&["perturb", "--p", "3", "--n", "2", "--l", "1", "--q", "9"]);
    assert_eq!(code, 2);
    assert!(err.contains("c0 = 9"));
    assert_eq!(run(&["perturb", "--p", "3", "--n", "2", "--l", "1", "--q", "9", "--explore"]).0, 0);
}

#[test]
fn roots_examples() {
    let (code, v) = json(&["roots", "--p", "7", "--d", "3", "--K", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 3);
    let (_, v) = json(&["roots", "--p", "17", "--d", "3", "--K", "3"]);
    assert_eq!(v["results"]["count"], 1);
    assert!(v["results"]["note"].as_str().unwrap().contains("gcd(3, 16) = 1"));
    let (_, v) = json(&["roots", "--p", "5", "--d", "2", "--K", "4"]);
    let roots: Vec<&str> = v["results"]["roots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["residue"].as_str().unwrap())
        .collect();
    assert_eq!(roots, vec!["1", "624"]);
    assert_eq!(run(&["roots", "--p", "2", "--d", "2"]).0, 2);
}

#[test]
fn json_output_is_byte_identical() {
    let args = ["--format", "json", "analyze", "--p", "5", "--n", "2", "--l", "1", "--depth", "3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert!(v["tool_version"].is_string());
    assert!(v["parameters"].is_object());
}

#[test]
fn out_file_receives_the_json_document() {
    let path = std::env::temp_dir().join(format!("padic-ergodic-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, _, _) = run(&["verify", "generation", "--p", "3", "--out", p]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"][0]["status"], "PASS");
    std::fs::remove_file(&path).ok();
}
