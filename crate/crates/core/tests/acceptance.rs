//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRng, TestRunner};

use common::{all_strings, enumerate_reduced, example_set, oracle, oracle_consistent, regex, regex_with_counts, SUB_ALPHABET};
use sketchregex::automata::{is_empty, matches};
use sketchregex::examplegen::generate_examples;
use sketchregex::grammar::{rule_feature, shipped_grammar, tokenize, FeatureTemplates, Grammar, WeightVector, SKIP_FEATURE};
use sketchregex::learning::{mle_objective_and_gradient, pseudogold_sketch, train_mml, MleItem, MmlItem, TrainConfig};
use sketchregex::pipeline::{evaluate, load_benchmarks, Benchmark, PipelineConfig, Ranking};
use sketchregex::regex::{parse_sketch, sketch_matches, BinaryOp, CharClass, Regex};
use sketchregex::synth::{synthesize, OpKind, Outcome, SynthConfig, Vocabulary};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn runner(seed: u8) -> TestRunner {
    TestRunner::new_with_rng(Config::default(), TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &[seed; 32]))
}

fn draw<S: Strategy>(s: &S, r: &mut TestRunner) -> S::Value {
    s.new_tree(r).expect("strategy rejected too many values").current()
}

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn matcher_vs_oracle() -> Verdict {
    let start = Instant::now();
    let strat = regex(4, true);
    let mut r = runner(1);
    let words: Vec<(String, Vec<char>)> = all_strings(&SUB_ALPHABET, 4)
        .into_iter()
        .map(|w| {
            let cs = w.chars().collect();
            (w, cs)
        })
        .collect();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let re = draw(&strat, &mut r);
        for (w, cs) in &words {
            if matches(&re, w).unwrap() != oracle(&re, cs) {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(mismatches == 0 && secs < 60.0, format!("1000 regexes x {} strings, {mismatches} mismatches, {secs:.1}s", words.len()))
}

fn emptiness() -> Verdict {
    let conflict = Regex::and(Regex::Class(CharClass::Vow), Regex::Class(CharClass::Num));
    let conflict_empty = is_empty(&conflict).unwrap();
    // counts of at most 2 at depth 3 keep every shortest witness within length 5,
    // and the space covers the one class member outside the sub-alphabet
    let mut alphabet = SUB_ALPHABET.to_vec();
    alphabet.push(' ');
    let words: Vec<Vec<char>> = all_strings(&alphabet, 5).iter().map(|w| w.chars().collect()).collect();
    let strat = regex_with_counts(3, true, 2);
    let mut r = runner(2);
    let (mut disagree, mut empties) = (0, 0);
    for _ in 0..200 {
        let re = draw(&strat, &mut r);
        let brute_empty = !words.iter().any(|w| oracle(&re, w));
        let empty = is_empty(&re).unwrap();
        empties += usize::from(brute_empty);
        if empty != brute_empty {
            disagree += 1;
        }
    }
    verdict(
        conflict_empty && disagree == 0,
        format!("And(<vow>,<num>) empty: {conflict_empty}; 200 random, {empties} empty, {disagree} disagreements"),
    )
}

fn examples_sound() -> Verdict {
    let strat = regex(4, true);
    let mut r = runner(3);
    let (mut done, mut drawn, mut bad, mut errors) = (0, 0, 0, 0);
    while done < 200 {
        let re = draw(&strat, &mut r);
        drawn += 1;
        if is_empty(&re).unwrap() || is_empty(&Regex::not(re.clone())).unwrap() {
            continue;
        }
        done += 1;
        match generate_examples(&re, 10, 10, 2, drawn) {
            Ok(ex) => {
                let sound = ex.positives.len() == 10
                    && ex.negatives.len() == 10
                    && ex.positives.iter().all(|w| oracle(&re, &w.chars().collect::<Vec<_>>()))
                    && ex.negatives.iter().all(|w| !oracle(&re, &w.chars().collect::<Vec<_>>()));
                bad += usize::from(!sound);
            }
            Err(_) => errors += 1,
        }
    }
    verdict(bad == 0 && errors == 0, format!("200 regexes ({drawn} drawn), {bad} unsound, {errors} errors"))
}

fn reduced_synth() -> SynthConfig {
    SynthConfig {
        depth_bound: 3,
        timeout: Duration::from_secs(2),
        vocabulary: Vocabulary {
            classes: vec![CharClass::Num, CharClass::Let],
            ops: vec![OpKind::Binary(BinaryOp::Concat), OpKind::Binary(BinaryOp::Or), OpKind::Repeat],
            int_pool: Some(vec![1, 2, 3]),
            example_literals: false,
        },
        ..SynthConfig::default()
    }
}

fn synth_complete() -> Verdict {
    let space = enumerate_reduced(3, &[1, 2, 3]);
    let strat = example_set();
    let mut r = runner(4);
    let cfg = reduced_synth();
    let (mut solvable, mut unsolvable, mut wrong, mut slow) = (0, 0, 0, 0);
    let mut worst = Duration::ZERO;
    for _ in 0..100 {
        let ex = draw(&strat, &mut r);
        let brute = space.iter().any(|re| oracle_consistent(re, &ex));
        let start = Instant::now();
        let out = synthesize(&sketchregex::regex::Sketch::empty_hole(), &ex, &cfg).unwrap().outcome;
        let t = start.elapsed();
        worst = worst.max(t);
        slow += usize::from(t > Duration::from_secs(2));
        let agrees = match (&out, brute) {
            (Outcome::Found(x), true) => oracle_consistent(x, &ex),
            (Outcome::NotFound, false) => true,
            _ => false,
        };
        wrong += usize::from(!agrees);
        if brute {
            solvable += 1;
        } else {
            unsolvable += 1;
        }
    }
    verdict(
        wrong == 0 && slow == 0,
        format!("{solvable} solvable, {unsolvable} unsolvable, {wrong} disagreements, slowest {:.2}s", worst.as_secs_f64()),
    )
}

fn load(name: &str) -> Vec<Benchmark> {
    load_benchmarks(format!("{DATA}/{name}")).unwrap()
}

fn decimal_sketch() -> Verdict {
    let item = load("decimal.jsonl").remove(0);
    let sketch = parse_sketch("Concat(?{<num>,<,>},?{<num>})").unwrap();
    let cfg = SynthConfig { timeout: Duration::from_secs(30), ..SynthConfig::default() };
    let start = Instant::now();
    let out = synthesize(&sketch, &item.examples, &cfg).unwrap().outcome;
    let secs = start.elapsed().as_secs_f64();
    match out {
        Outcome::Found(x) => verdict(
            oracle_consistent(&x, &item.examples) && secs < 30.0,
            format!("{x} in {secs:.1}s"),
        ),
        other => verdict(false, format!("{other:?} after {secs:.1}s")),
    }
}

fn pseudogold() -> Verdict {
    let strat = regex(5, true);
    let mut r = runner(6);
    let bad = (0..1000)
        .filter(|_| {
            let re = draw(&strat, &mut r);
            !sketch_matches(&pseudogold_sketch(&re), &re)
        })
        .count();
    verdict(bad == 0, format!("1000 regexes, {bad} sketches that do not fit"))
}

fn gradient_check() -> Verdict {
    let g = Grammar::from_text("$ROOT $ROOT -> $ROOT [ConcatFn arg:0 arg:1]", "a\t$ROOT\t<a>\na\t$ROOT\t<b>").unwrap();
    let item = |text: &str, gold: &str| MleItem { tokens: tokenize(text).unwrap(), gold: parse_sketch(gold).unwrap() };
    let data = [item("a a", "Concat(<a>,<b>)"), item("a", "<b>"), item("a a a", "Concat(<b>,Concat(<a>,<a>))")];
    let cfg = TrainConfig {
        beam_size: 50,
        l2: 0.1,
        templates: FeatureTemplates { rule: true, rule_token: false, bigram: false, skip: false },
        ..TrainConfig::mle()
    };
    let (_, probe) = mle_objective_and_gradient(&g, &data, &WeightVector::new(), &cfg);
    let features: Vec<String> = probe.keys().cloned().collect();
    let mut w = WeightVector::new();
    for (i, f) in features.iter().enumerate() {
        w.set(f, 0.3 * i as f64 - 0.2);
    }
    let (_, grad) = mle_objective_and_gradient(&g, &data, &w, &cfg);
    let eps = 1e-4;
    let mut worst: f64 = 0.0;
    for f in &features {
        let at = |d: f64| {
            let mut v = w.clone();
            v.set(f, w.get(f) + d);
            mle_objective_and_gradient(&g, &data, &v, &cfg).0
        };
        let numeric = (at(eps) - at(-eps)) / (2.0 * eps);
        let analytic = grad.get(f).copied().unwrap_or(0.0);
        let rel = (numeric - analytic).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    let only_rules = features.len() == 3 && features.iter().all(|f| f.starts_with(&rule_feature("")));
    verdict(
        only_rules && worst < 1e-5,
        format!("{} features {:?}, worst relative error {worst:.2e}", features.len(), features),
    )
}

/// An expansion cap rather than the wall clock bounds each search, so results
/// do not depend on scheduling.
fn micro_config(ranking: Ranking, threads: usize) -> PipelineConfig {
    PipelineConfig {
        ranking,
        threads,
        max_expansions: Some(20_000),
        timeout: Duration::from_secs(60),
        ..PipelineConfig::turk()
    }
}

fn learning_helps() -> Verdict {
    let g = shipped_grammar();
    let data = load("turk_micro.jsonl");
    let base_cfg = micro_config(Ranking::MaxCoverage, 10);
    let base = evaluate(&g, &data, &WeightVector::new(), &base_cfg, &[1]).unwrap();
    let mut init = WeightVector::new();
    init.set(SKIP_FEATURE, -1.0);
    let items: Vec<MmlItem> = data
        .iter()
        .map(|b| MmlItem {
            tokens: tokenize(&b.description).unwrap(),
            gold: b.gold_regex.clone().unwrap(),
            examples: b.examples.clone(),
        })
        .collect();
    let trained = train_mml(&g, &items, &TrainConfig::mml(), &base_cfg.synth_config(), init).unwrap();
    let after = evaluate(&g, &data, &trained.weights, &micro_config(Ranking::Model, 10), &[1]).unwrap();
    verdict(
        base.semantic_accuracy >= 0.5 && after.semantic_accuracy >= base.semantic_accuracy,
        format!(
            "max-coverage {:.3} (top-1 {:.3}), trained {:.3} (top-1 {:.3})",
            base.semantic_accuracy, base.top_n[0].accuracy, after.semantic_accuracy, after.top_n[0].accuracy
        ),
    )
}

fn determinism() -> Verdict {
    let g = shipped_grammar();
    let data: Vec<Benchmark> = load("turk_micro.jsonl").into_iter().step_by(3).collect();
    let report = |threads| {
        let rep = evaluate(&g, &data, &WeightVector::new(), &micro_config(Ranking::MaxCoverage, threads), &[1, 5]).unwrap();
        serde_json::to_string(&rep).unwrap()
    };
    let runs = [report(1), report(1), report(10), report(10)];
    let same = runs.iter().all(|r| r == &runs[0]);
    verdict(same, format!("{} items, 2 runs each at 1 and 10 threads, {} bytes", data.len(), runs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("matcher agrees with set semantics", matcher_vs_oracle),
        ("emptiness agrees with brute force", emptiness),
        ("generated examples are sound", examples_sound),
        ("synthesis complete on the reduced language", synth_complete),
        ("worked sketch completes to a consistent regex", decimal_sketch),
        ("pseudo-gold sketches fit their regex", pseudogold),
        ("likelihood gradient matches finite differences", gradient_check),
        ("learned ranking no worse than max coverage", learning_helps),
        ("evaluation is deterministic across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name} ({}; {:.1}s)", i + 1, v.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!v.ok);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
