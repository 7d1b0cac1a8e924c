use crate::regex::{BinaryOp, CharClass, Count, Regex, Sketch, UnaryOp};

use super::{OpKind, SynthConfig};

/// An operator with its integer parameters fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Template {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Repeat(Count),
}

/// Everything a hole may be filled with, fixed for one synthesis run.
pub(crate) struct Space {
    pub terminals: Vec<Regex>,
    pub templates: Vec<Template>,
    pub depth_bound: usize,
}

impl Space {
    pub fn new(sketch: &Sketch, examples_positive: &[String], cfg: &SynthConfig) -> Space {
        let vocab = &cfg.vocabulary;
        let mut terminals: Vec<Regex> = vocab.classes.iter().map(|&c| Regex::Class(c)).collect();
        let mut literals: Vec<char> = sketch.literals();
        if vocab.example_literals {
            literals.extend(
                examples_positive
                    .iter()
                    .flat_map(|p| p.chars())
                    .filter(|c| !c.is_ascii_alphanumeric()),
            );
        }
        literals.sort_unstable();
        literals.dedup();
        terminals.extend(literals.into_iter().map(Regex::Lit));

        let pool = int_pool(sketch, cfg);
        let mut templates = vec![];
        for op in &vocab.ops {
            match *op {
                OpKind::Unary(u) => templates.push(Template::Unary(u)),
                OpKind::Binary(b) => templates.push(Template::Binary(b)),
                OpKind::Repeat => {
                    templates.extend(pool.iter().map(|&k| Template::Repeat(Count::Exactly(k))))
                }
                OpKind::RepeatAtLeast => {
                    templates.extend(pool.iter().map(|&k| Template::Repeat(Count::AtLeast(k))))
                }
                OpKind::RepeatRange => {
                    for (i, &lo) in pool.iter().enumerate() {
                        for &hi in &pool[i + 1..] {
                            templates.push(Template::Repeat(Count::Range(lo, hi)));
                        }
                    }
                }
            }
        }
        Space {
            terminals,
            templates,
            depth_bound: cfg.depth_bound,
        }
    }
}

/// The configured integer pool, or 1 through 9 plus the sketch's integers.
pub(crate) fn int_pool(sketch: &Sketch, cfg: &SynthConfig) -> Vec<u32> {
    let mut pool = match &cfg.vocabulary.int_pool {
        Some(p) => p.clone(),
        None => (1..=9).chain(sketch.integers()).collect(),
    };
    pool.retain(|&k| k > 0);
    pool.sort_unstable();
    pool.dedup();
    pool
}

/// Character classes offered as terminals by default.
pub(crate) fn default_classes() -> Vec<CharClass> {
    CharClass::CHARACTER_CLASSES.to_vec()
}
