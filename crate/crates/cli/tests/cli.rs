use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn markmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markmix")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mixture_and_its_hmm_compare_equal() {
    let dir = tempfile::tempdir().unwrap();
    let mixture = models().join("markov_mixture.json");
    let hmm = dir.path().join("hmm.json");
    let out = markmix(&["convert", "--from", path_str(&mixture), "--to", "hmm"]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(&hmm, &out.stdout).unwrap();

    let out = markmix(&["compare", path_str(&mixture), path_str(&hmm), "--horizon", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["total_variation"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["equal"], true);
}

#[test]
fn different_models_compare_unequal() {
    let out = markmix(&[
        "compare",
        path_str(&models().join("markov_mixture.json")),
        path_str(&models().join("noisy_hmm.json")),
        "--horizon",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_names_the_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        r#"{"type": "hmm", "alphabet": ["a", "b"], "hidden_states": ["0", "1"], "initial": [0.5, 0.5],
            "transition": [[0.6, 0.5], [0.5, 0.5]], "readout": [[1.0, 0.0], [0.0, 1.0]]}"#,
    )
    .unwrap();
    let out = markmix(&["validate", path_str(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("transition row 0"), "{text}");

    for name in ["markov_mixture.json", "noisy_hmm.json", "iid_mixture.json", "partitioned.json"] {
        assert_eq!(markmix(&["validate", path_str(&models().join(name))]).status.code(), Some(0), "{name}");
    }
}

#[test]
fn simulate_is_reproducible() {
    let m = models().join("markov_mixture.json");
    let args = ["simulate", path_str(&m), "--length", "5", "--seed", "7"];
    let a = markmix(&args);
    let b = markmix(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).split_whitespace().count(), 5);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(markmix(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(markmix(&["law", "--horizon", "2"]).status.code(), Some(2));
    assert_eq!(markmix(&["validate", "/nonexistent/model.json"]).status.code(), Some(2));
}

#[test]
fn law_lines_sum_to_one() {
    let out = markmix(&["law", path_str(&models().join("iid_mixture.json")), "--horizon", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let total: f64 = String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_whitespace().last()?.parse::<f64>().ok())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn verify_lemmas_on_a_mixture_passes() {
    let out = markmix(&["verify-lemmas", "--model", path_str(&models().join("markov_mixture.json")), "--horizon", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn does_not_touch_inputs() {
    let m = models().join("partitioned.json");
    let before = std::fs::read(&m).unwrap();
    assert_eq!(markmix(&["convert", "--from", path_str(&m), "--to", "hmm", "--check", "3"]).status.code(), Some(0));
    assert_eq!(std::fs::read(&m).unwrap(), before);
}
