//! Enumerative sketch completion.
//!
//! Partial programs are sketches whose holes are still to be filled. The
//! worklist is ordered by overlap with the sketch's hole components (more
//! first), then by size (smaller first), then by insertion order. Each step
//! fills the leftmost-outermost hole with a component, a terminal, or an
//! operator over fresh holes. A partial program is discarded when even the
//! most permissive completion misses a positive example or the most
//! restrictive completion accepts a negative one.

mod arena;
mod infix;
mod search;
mod space;

use std::time::Duration;

use thiserror::Error;

use crate::automata::Matcher;
use crate::examplegen::Examples;
use crate::regex::{in_alphabet, BinaryOp, CharClass, Regex, Sketch, UnaryOp};

pub use infix::MAX_EXAMPLE_LEN;

pub const DEFAULT_DEPTH: usize = 4;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(2);
pub const DEFAULT_MAX_WORKLIST: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Repeat,
    RepeatAtLeast,
    RepeatRange,
}

impl OpKind {
    pub const ALL: [OpKind; 12] = [
        OpKind::Unary(UnaryOp::StartsWith),
        OpKind::Unary(UnaryOp::EndsWith),
        OpKind::Unary(UnaryOp::Contains),
        OpKind::Unary(UnaryOp::Not),
        OpKind::Unary(UnaryOp::Optional),
        OpKind::Unary(UnaryOp::KleeneStar),
        OpKind::Binary(BinaryOp::Concat),
        OpKind::Binary(BinaryOp::And),
        OpKind::Binary(BinaryOp::Or),
        OpKind::Repeat,
        OpKind::RepeatAtLeast,
        OpKind::RepeatRange,
    ];
}

/// The constructs the synthesizer may introduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub classes: Vec<CharClass>,
    pub ops: Vec<OpKind>,
    /// Repetition counts; `None` means 1 through 9 plus the sketch's integers.
    pub int_pool: Option<Vec<u32>>,
    /// Offer non-alphanumeric characters of the positive examples as literals.
    pub example_literals: bool,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            classes: space::default_classes(),
            ops: OpKind::ALL.to_vec(),
            int_pool: None,
            example_literals: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub depth_bound: usize,
    pub timeout: Duration,
    pub max_worklist: usize,
    /// Deterministic budget on dequeued partial programs. Exceeding it is
    /// reported as a timeout.
    pub max_expansions: Option<u64>,
    pub vocabulary: Vocabulary,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            depth_bound: DEFAULT_DEPTH,
            timeout: DEFAULT_TIMEOUT,
            max_worklist: DEFAULT_MAX_WORKLIST,
            max_expansions: None,
            vocabulary: Vocabulary::default(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: &str| Err(SynthError::InvalidConfig(msg.to_string()));
        if self.depth_bound == 0 {
            return bad("depth bound must be at least 1");
        }
        if self.timeout.is_zero() {
            return bad("timeout must be positive");
        }
        if self.max_worklist == 0 {
            return bad("worklist cap must be positive");
        }
        if self.vocabulary.int_pool.as_ref().is_some_and(|p| p.contains(&0)) {
            return bad("repetition counts must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("example {0:?} is both positive and negative")]
    Contradictory(String),
    #[error("invalid synthesizer configuration: {0}")]
    InvalidConfig(String),
    #[error("example character {0:?} is outside the alphabet")]
    OutOfAlphabet(char),
    #[error("example of length {0} exceeds the supported maximum of {MAX_EXAMPLE_LEN}")]
    ExampleTooLong(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Found(Regex),
    /// Every completion within the depth bound was ruled out.
    NotFound,
    /// The time, worklist or expansion budget ran out first.
    Timeout,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynthStats {
    /// Partial programs taken off the worklist.
    pub expansions: u64,
    pub generated: u64,
    pub pruned: u64,
    pub duplicates: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthResult {
    pub outcome: Outcome,
    pub stats: SynthStats,
}

impl SynthResult {
    pub fn regex(&self) -> Option<&Regex> {
        match &self.outcome {
            Outcome::Found(r) => Some(r),
            _ => None,
        }
    }
}

/// Searches for a completion of `sketch` that accepts every positive and
/// rejects every negative example.
pub fn synthesize(
    sketch: &Sketch,
    examples: &Examples,
    cfg: &SynthConfig,
) -> Result<SynthResult, SynthError> {
    cfg.validate()?;
    if let Some(w) = examples.contradiction() {
        return Err(SynthError::Contradictory(w.to_string()));
    }
    for w in examples.positives.iter().chain(&examples.negatives) {
        if let Some(c) = w.chars().find(|&c| !in_alphabet(c)) {
            return Err(SynthError::OutOfAlphabet(c));
        }
        let len = w.chars().count();
        if len > MAX_EXAMPLE_LEN {
            return Err(SynthError::ExampleTooLong(len));
        }
    }
    Ok(search::run(sketch, examples, cfg))
}

/// Whether `r` accepts all positives and rejects all negatives. Strings with
/// characters outside the alphabet count as failures.
pub fn consistent(r: &Regex, examples: &Examples) -> bool {
    let mut m = Matcher::new(r);
    examples.positives.iter().all(|p| m.matches(p) == Ok(true))
        && examples.negatives.iter().all(|n| m.matches(n) == Ok(false))
}

/// One expansion step of the search: children of `partial` obtained by
/// filling its leftmost-outermost hole, for a search started from `sketch`.
///
/// Children whose completions would exceed the depth bound are dropped.
/// Examples only contribute literal terminals here; no pruning is applied.
pub fn expand(partial: &Sketch, sketch: &Sketch, examples: &Examples, cfg: &SynthConfig) -> Vec<Sketch> {
    let space = space::Space::new(sketch, &examples.positives, cfg);
    let table = infix::InfixTable::new(&examples.positives, &examples.negatives);
    let mut arena = arena::Arena::new(table, sketch);
    let root = arena.import(partial);
    arena
        .expand(root, &space)
        .into_iter()
        .map(|id| arena.export(id))
        .collect()
}
