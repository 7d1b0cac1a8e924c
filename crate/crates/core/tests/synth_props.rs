mod common;

use std::time::Duration;

use proptest::prelude::*;

use common::{enumerate_reduced, example_set, oracle_consistent, regex};
use sketchregex::automata::is_empty;
use sketchregex::examplegen::generate_examples;
use sketchregex::learning::pseudogold_sketch;
use sketchregex::regex::{sketch_matches, BinaryOp, CharClass, Regex, Sketch};
use sketchregex::synth::{synthesize, OpKind, Outcome, SynthConfig, Vocabulary};

fn budgeted(depth: usize, expansions: u64) -> SynthConfig {
    SynthConfig {
        depth_bound: depth,
        timeout: Duration::from_secs(60),
        max_expansions: Some(expansions),
        ..SynthConfig::default()
    }
}

fn reduced(depth: usize) -> SynthConfig {
    SynthConfig {
        depth_bound: depth,
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn results_are_consistent_and_fit_the_sketch(r in regex(3, true), seed in any::<u64>(), empty in any::<bool>()) {
        prop_assume!(!is_empty(&r).unwrap() && !is_empty(&Regex::not(r.clone())).unwrap());
        let ex = generate_examples(&r, 5, 5, 2, seed).unwrap();
        prop_assume!(ex.positives.iter().chain(&ex.negatives).all(|w| w.len() <= 20));
        let sketch = if empty { Sketch::empty_hole() } else { pseudogold_sketch(&r) };
        let res = synthesize(&sketch, &ex, &budgeted(3, 5_000)).unwrap();
        if let Outcome::Found(x) = &res.outcome {
            prop_assert!(oracle_consistent(x, &ex), "{} inconsistent", x);
            prop_assert!(sketch_matches(&sketch, x), "{} does not fit {}", x, sketch);
        }
        prop_assert_eq!(synthesize(&sketch, &ex, &budgeted(3, 5_000)).unwrap().outcome, res.outcome);
    }

    #[test]
    fn more_budget_never_loses_a_solution(ex in example_set()) {
        let small = synthesize(&Sketch::empty_hole(), &ex, &reduced(2)).unwrap().outcome;
        let deeper = synthesize(&Sketch::empty_hole(), &ex, &reduced(3)).unwrap().outcome;
        if matches!(small, Outcome::Found(_)) {
            prop_assert!(deeper != Outcome::NotFound);
        }
        let capped = synthesize(&Sketch::empty_hole(), &ex, &SynthConfig { max_expansions: Some(200), ..reduced(3) })
            .unwrap()
            .outcome;
        if matches!(capped, Outcome::Found(_)) {
            prop_assert!(deeper != Outcome::NotFound);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn complete_at_depth_three(ex in example_set()) {
        let space = enumerate_reduced(3, &[1, 2, 3]);
        let brute = space.iter().find(|r| oracle_consistent(r, &ex));
        let res = synthesize(&Sketch::empty_hole(), &ex, &reduced(3)).unwrap();
        match (&res.outcome, brute) {
            (Outcome::Found(x), Some(_)) => prop_assert!(oracle_consistent(x, &ex)),
            (Outcome::NotFound, None) => {}
            (got, want) => prop_assert!(false, "synthesizer {:?}, enumerator {:?}", got, want.map(ToString::to_string)),
        }
    }
}
