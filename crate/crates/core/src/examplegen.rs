//! Positive and negative example strings sampled from a ground-truth regex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{self, AutomataError};
use crate::regex::{Regex, UnaryOp};

pub const DEFAULT_POSITIVES: usize = 10;
pub const DEFAULT_NEGATIVES: usize = 10;
pub const DEFAULT_VISIT_LIMIT: u32 = 2;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Examples {
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
}

impl Examples {
    pub fn new<S: Into<String>>(
        positives: impl IntoIterator<Item = S>,
        negatives: impl IntoIterator<Item = S>,
    ) -> Examples {
        Examples {
            positives: positives.into_iter().map(Into::into).collect(),
            negatives: negatives.into_iter().map(Into::into).collect(),
        }
    }

    /// A string listed as both positive and negative, if any.
    pub fn contradiction(&self) -> Option<&str> {
        self.positives
            .iter()
            .find(|p| self.negatives.contains(p))
            .map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExampleGenError {
    #[error("the regex matches no strings, so no positive examples exist")]
    PositiveSideEmpty,
    #[error("the regex matches every string, so no negative examples exist")]
    NegativeSideEmpty,
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

fn side(r: &Regex, n: usize, visit_limit: u32, seed: u64, empty: ExampleGenError)
    -> Result<Vec<String>, ExampleGenError> {
    if n == 0 {
        return Ok(vec![]);
    }
    let dfa = automata::build_dfa(r)?;
    match automata::sample_strings(&dfa, n, visit_limit, seed) {
        Ok(sample) => {
            if sample.exhausted {
                log::warn!("only a few distinct strings for {r}; examples repeat");
            }
            Ok(sample.strings)
        }
        Err(AutomataError::EmptyLanguage) => Err(empty),
        Err(e) => Err(e.into()),
    }
}

/// Samples `n_pos` strings of `r` and `n_neg` strings of its complement.
pub fn generate_examples(
    r: &Regex,
    n_pos: usize,
    n_neg: usize,
    visit_limit: u32,
    seed: u64,
) -> Result<Examples, ExampleGenError> {
    let not_r = Regex::unary(UnaryOp::Not, r.clone());
    // split the seed so the two sides draw independent streams
    let positives = side(r, n_pos, visit_limit, seed.wrapping_mul(2), ExampleGenError::PositiveSideEmpty)?;
    let negatives = side(
        &not_r,
        n_neg,
        visit_limit,
        seed.wrapping_mul(2).wrapping_add(1),
        ExampleGenError::NegativeSideEmpty,
    )?;
    Ok(Examples {
        positives,
        negatives,
    })
}
