//! Parameter estimation for the sketch parser.
//!
//! MLE fits the weights to fixed gold sketches. MML only needs the gold regex:
//! a sketch counts as correct when the synthesizer turns it into an equivalent
//! regex. Both approximate the partition function by the parser's beam, and
//! both use plain minibatch SGD with an L2 penalty.

mod train;

use thiserror::Error;

use crate::grammar::{FeatureTemplates, Parse, ParseConfig};
use crate::regex::{Regex, Sketch};

pub use crate::grammar::WeightVector;
pub use train::{
    gold_derivation, mle_item, mle_objective_and_gradient, mml_item, train_mle, train_mml, EpochLog,
    ItemGradient, MleItem, MmlItem, TrainReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Mle,
    Mml,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// L2 penalty coefficient.
    pub l2: f64,
    /// Parser beam used for the normalizer and, under MML, for the sketches
    /// handed to the synthesizer.
    pub beam_size: usize,
    pub objective: Objective,
    pub seed: u64,
    pub templates: FeatureTemplates,
}

impl TrainConfig {
    pub fn mle() -> TrainConfig {
        TrainConfig {
            epochs: 5,
            batch_size: 50,
            learning_rate: 0.1,
            l2: 1e-4,
            beam_size: 200,
            objective: Objective::Mle,
            seed: 0,
            templates: FeatureTemplates::default(),
        }
    }

    pub fn mml() -> TrainConfig {
        TrainConfig {
            learning_rate: 0.01,
            objective: Objective::Mml,
            ..TrainConfig::mle()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::InvalidConfig(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if self.beam_size == 0 {
            return bad("beam size must be at least 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return bad("L2 penalty must be non-negative");
        }
        Ok(())
    }

    pub(crate) fn parse_config(&self) -> ParseConfig {
        ParseConfig {
            beam: self.beam_size,
            templates: self.templates,
            ..ParseConfig::default()
        }
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::mle()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
}

/// Heuristic gold sketch: the root operator of `r` becomes a hole constrained
/// by the operator's arguments. Depth-1 regexes become a hole over themselves.
pub fn pseudogold_sketch(r: &Regex) -> Sketch {
    if r.depth() > 1 {
        Sketch::hole(r.children().into_iter().map(Regex::to_sketch).collect())
    } else {
        Sketch::hole(vec![r.to_sketch()])
    }
}

/// Reorders parses by the number of tokens they do not skip, most first;
/// ties keep their order.
pub fn max_coverage_rank(mut parses: Vec<Parse>) -> Vec<Parse> {
    parses.sort_by_key(|p| std::cmp::Reverse(p.derivation.covered()));
    parses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse, tokenize, Grammar};
    use crate::regex::{parse_regex, sketch_matches};

    #[test]
    fn pseudogold_examples() {
        let cases = [
            ("Concat(<num>,<let>)", "?{<num>,<let>}"),
            ("<num>", "?{<num>}"),
            ("Not(Contains(<vow>))", "?{Contains(<vow>)}"),
            ("RepeatRange(<num>,1,3)", "?{<num>}"),
        ];
        for (r, s) in cases {
            let r = parse_regex(r).unwrap();
            let sk = pseudogold_sketch(&r);
            assert_eq!(sk.to_string(), s);
            assert!(sketch_matches(&sk, &r));
        }
    }

    fn parses(text: &str) -> Vec<Parse> {
        let g = Grammar::from_text(
            "$CC -> $ROOT [UnarySketchFn arg:0]\n$CC $CC -> $ROOT [ConcatFn arg:0 arg:1]",
            "digit\t$CC\t<num>\nletter\t$CC\t<let>",
        )
        .unwrap();
        parse(&g, &tokenize(text).unwrap(), &WeightVector::new(), &ParseConfig::default())
    }

    #[test]
    fn coverage_ranking() {
        let ps = parses("x digit y letter z");
        let ranked = max_coverage_rank(ps.clone());
        assert_eq!(ranked.len(), ps.len());
        assert!(ranked.windows(2).all(|w| w[0].derivation.covered() >= w[1].derivation.covered()));
        assert_eq!(ranked[0].derivation.skipped(), 3);
        // equal coverage keeps the parser's order
        let singles: Vec<_> = ps.iter().filter(|p| p.derivation.covered() == 1).map(|p| &p.sketch).collect();
        let ranked_singles: Vec<_> =
            ranked.iter().filter(|p| p.derivation.covered() == 1).map(|p| &p.sketch).collect();
        assert_eq!(singles, ranked_singles);
        assert!(max_coverage_rank(vec![]).is_empty());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::mle().validate().is_ok());
        assert_eq!(TrainConfig::mml().learning_rate, 0.01);
        let bad = TrainConfig { batch_size: 0, ..TrainConfig::mle() };
        assert!(bad.validate().is_err());
        let bad = TrainConfig { epochs: 0, ..TrainConfig::mle() };
        assert!(bad.validate().is_err());
    }
}
