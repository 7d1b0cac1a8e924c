use std::time::Duration;

use sketchregex::grammar::{shipped_grammar, tokenize, WeightVector};
use sketchregex::learning::{train_mle, MleItem, TrainConfig};
use sketchregex::pipeline::{
    load_benchmarks, run_benchmark, Benchmark, PipelineConfig, Ranking, RunStatus, SketchStatus,
};
use sketchregex::synth::consistent;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn load(name: &str) -> Vec<Benchmark> {
    load_benchmarks(format!("{DATA}/{name}")).unwrap()
}

#[test]
fn shipped_datasets_are_valid() {
    let turk = load("turk_micro.jsonl");
    assert_eq!(turk.len(), 30);
    for b in turk.iter().chain(&load("decimal.jsonl")) {
        assert_eq!(b.validate(), None);
        assert!(b.gold_regex.is_some());
        assert!(tokenize(&b.description).is_ok());
    }
    assert!(turk.iter().all(|b| b.examples.positives.len() == 10 && b.examples.negatives.len() == 10));
}

#[test]
fn decimal_end_to_end_with_trained_weights() {
    let g = shipped_grammar();
    let bench = load("decimal.jsonl").remove(0);
    let item = MleItem {
        tokens: tokenize(&bench.description).unwrap(),
        gold: bench.gold_sketch.clone().unwrap(),
    };
    let cfg = TrainConfig { epochs: 10, batch_size: 1, ..TrainConfig::mle() };
    let w = train_mle(&g, &[item], &cfg).unwrap().weights;
    // one sketch on one thread, so the 30s budget is not shared with others
    let pcfg = PipelineConfig { beam: 1, threads: 1, ..PipelineConfig::stackoverflow() };
    let rec = run_benchmark(&g, &bench, &w, &pcfg).unwrap();
    assert_eq!(rec.sketches[0].sketch, bench.gold_sketch.unwrap());
    assert_eq!(rec.status, RunStatus::Solved, "{rec:?}");
    assert!(consistent(rec.regex.as_ref().unwrap(), &bench.examples));
}

#[test]
fn output_comes_from_first_consistent_sketch() {
    let g = shipped_grammar();
    let cfg = PipelineConfig {
        ranking: Ranking::MaxCoverage,
        max_expansions: Some(20_000),
        timeout: Duration::from_secs(60),
        ..PipelineConfig::turk()
    };
    for b in load("turk_micro.jsonl").iter().step_by(5) {
        let rec = run_benchmark(&g, b, &WeightVector::new(), &cfg).unwrap();
        let first = rec.sketches.iter().position(|o| o.status == SketchStatus::Consistent);
        assert_eq!(rec.rank, first, "{}", b.id);
        assert_eq!(rec.status == RunStatus::Solved, first.is_some());
        if let Some(r) = &rec.regex {
            assert!(consistent(r, &b.examples));
            assert_eq!(rec.sketches[rec.rank.unwrap()].regex.as_ref(), Some(r));
        }
    }
}
