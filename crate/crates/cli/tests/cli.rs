use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const MICRO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/turk_micro.jsonl");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sketchregex")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn parse_lists_ranked_sketches() {
    let out = run(&["parse", "lines with a digit", "--beam", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let list = json(&out);
    let list = list.as_array().unwrap();
    assert!(!list.is_empty() && list.len() <= 5);
    assert!(list.iter().enumerate().all(|(i, s)| s["rank"] == i && s["sketch"].is_string()));
}

#[test]
fn synth_exit_code_follows_outcome() {
    let found = run(&["synth", "Concat(?{<num>},?{<let>})", "--pos", "1a", "--pos", "22b", "--neg", "a1", "--format", "json"]);
    assert_eq!(found.status.code(), Some(0));
    assert_eq!(json(&found)["status"], "found");

    let missing = run(&["synth", "<num>", "--pos", "a", "--neg", "1"]);
    assert_eq!(missing.status.code(), Some(1));

    let bad_sketch = run(&["synth", "Concat(<num>", "--pos", "1"]);
    assert_eq!(bad_sketch.status.code(), Some(2));
}

#[test]
fn gen_examples_is_seeded() {
    let args = ["gen-examples", "Repeat(<num>,2)", "--n-pos", "3", "--n-neg", "3", "--seed", "4", "--format", "json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ex = json(&a);
    assert_eq!(ex["pos"].as_array().unwrap().len(), 3);
    assert_eq!(ex["neg"].as_array().unwrap().len(), 3);
}

#[test]
fn train_writes_weights_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    let lines: Vec<&str> = include_str!("../../core/data/turk_micro.jsonl").lines().take(4).collect();
    fs::write(&data, lines.join("\n")).unwrap();
    let (weights, log) = (dir.path().join("w.tsv"), dir.path().join("log.csv"));
    let out = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--out",
        weights.to_str().unwrap(),
        "--log",
        log.to_str().unwrap(),
        "--epochs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let w = fs::read_to_string(&weights).unwrap();
    assert!(w.lines().count() > 0 && w.lines().all(|l| l.split('\t').count() == 2));
    let log = fs::read_to_string(&log).unwrap();
    assert_eq!(log.lines().next(), Some("epoch,objective,skipped,timeouts"));
    assert_eq!(log.lines().count(), 3);
}

#[test]
fn eval_output_does_not_depend_on_threads() {
    let common = ["eval", "--data", MICRO, "--topn", "1,5", "--format", "json", "--ranking", "max-coverage"];
    let budget = ["--max-expansions", "20000", "--timeout-ms", "60000"];
    let one = run(&[&common[..], &budget, &["--threads", "1"]].concat());
    let many = run(&[&common[..], &budget, &["--threads", "10"]].concat());
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, many.stdout);
    let rep = json(&one);
    assert_eq!(rep["items"], 30);
    assert!(rep["semantic_accuracy"].as_f64().unwrap() >= 0.5);
}

#[test]
fn run_exit_codes() {
    let solved = run(&["run", "--description", "two digits", "--pos", "12", "--pos", "45", "--neg", "1", "--neg", "ab", "--max-expansions", "20000"]);
    assert_eq!(solved.status.code(), Some(0));

    let contradictory = run(&["run", "--description", "two digits", "--pos", "12", "--neg", "12", "--format", "json"]);
    assert_eq!(contradictory.status.code(), Some(1));
    assert_eq!(json(&contradictory)["status"], "contradictory");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["eval"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--description", "x", "--profile", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--data", "/nonexistent/data.jsonl"]).status.code(), Some(2));
}
