//! Chart parser from descriptions to sketches.
//!
//! A grammar pairs a lexicon (phrases mapped to categories and constant
//! values) with compositional rules whose actions are semantic functions.
//! Parsing is CKY over token spans with a per-category beam in every span.
//! Any token may be skipped at the cost of the `skip` feature; derivations
//! are scored by a log-linear model over sparse features.

mod chart;
mod features;
mod rules;
mod semfn;
mod tokenize;

pub use chart::{
    extract_features, parse, parse_filtered, Derivation, Parse, ParseConfig, Producer, DEFAULT_BEAM,
    DEFAULT_UNARY_LIMIT,
};
pub use features::{
    bigram_feature, rule_feature, rule_token_feature, FeatureMap, FeatureTemplates, WeightVector,
    WeightsError, SKIP_FEATURE,
};
pub use rules::{load_grammar, Action, CatId, Grammar, GrammarError, Rule, Selector, Symbol, NUMBER, PHRASE, ROOT};
pub use semfn::{apply_semfn, SemError, SemFn, Value};
pub use tokenize::{tokenize, Token, TokenizeError};

/// Rules file shipped with the crate.
pub const SHIPPED_RULES: &str = include_str!("../../grammar/rules.grammar");
/// Lexicon shipped with the crate.
pub const SHIPPED_LEXICON: &str = include_str!("../../grammar/lexicon.tsv");

/// The shipped grammar.
pub fn shipped_grammar() -> Grammar {
    Grammar::from_text(SHIPPED_RULES, SHIPPED_LEXICON).expect("shipped grammar is valid")
}
