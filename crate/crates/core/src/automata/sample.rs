use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AutomataError, Dfa};

/// Walks longer than this are abandoned and restarted.
pub const MAX_SAMPLE_LENGTH: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub strings: Vec<String>,
    /// Set when fewer than the requested number of distinct strings could be
    /// found and the output was padded with repeats.
    pub exhausted: bool,
}

/// Transitions taken by a walk, as a sorted multiset of (state, block).
type Signature = Vec<(usize, usize)>;

/// One random walk. Returns `None` when the walk gets stuck or runs long.
fn walk(
    dfa: &Dfa,
    live: &[bool],
    visit_limit: u32,
    rng: &mut ChaCha8Rng,
) -> Option<(String, Signature)> {
    let mut visits: HashMap<(usize, usize), u32> = HashMap::new();
    let mut state = dfa.start();
    let mut out = String::new();
    loop {
        // None stands for stopping in an accepting state
        let mut moves: Vec<Option<usize>> = vec![];
        if dfa.is_accepting(state) {
            moves.push(None);
        }
        for b in 0..dfa.blocks().len() {
            let t = dfa.target(state, b);
            if live[t] && visits.get(&(state, b)).copied().unwrap_or(0) < visit_limit {
                moves.push(Some(b));
            }
        }
        match *moves.choose(rng)? {
            None => {
                let mut sig: Signature = visits
                    .into_iter()
                    .flat_map(|(k, n)| std::iter::repeat(k).take(n as usize))
                    .collect();
                sig.sort_unstable();
                return Some((out, sig));
            }
            Some(b) => {
                *visits.entry((state, b)).or_insert(0) += 1;
                let block = dfa.blocks()[b];
                out.push(block.nth(rng.gen_range(0..block.len())).unwrap());
                if out.len() > MAX_SAMPLE_LENGTH {
                    return None;
                }
                state = dfa.target(state, b);
            }
        }
    }
}

/// Draws `n` strings from the language of `dfa` by random walks.
///
/// Each walk chooses uniformly among stopping (when in an accepting state)
/// and the transitions that still lead to acceptance and have been taken
/// fewer than `visit_limit` times in this walk. Walks over a transition
/// multiset not seen before are preferred, then any new string; if the
/// language is too small the result repeats strings.
pub fn sample_strings(
    dfa: &Dfa,
    n: usize,
    visit_limit: u32,
    seed: u64,
) -> Result<Sample, AutomataError> {
    let live = dfa.live_states();
    if !live[dfa.start()] {
        return Err(AutomataError::EmptyLanguage);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut signatures = HashSet::new();
    let mut strings = vec![];
    let attempts = n * 25 + 50;
    for fresh_path_only in [true, false] {
        for _ in 0..attempts {
            if strings.len() >= n {
                break;
            }
            let Some((w, sig)) = walk(dfa, &live, visit_limit.max(1), &mut rng) else {
                continue;
            };
            if seen.contains(&w) || (fresh_path_only && signatures.contains(&sig)) {
                continue;
            }
            seen.insert(w.clone());
            signatures.insert(sig);
            strings.push(w);
        }
    }
    let exhausted = strings.len() < n;
    if strings.is_empty() {
        strings.push(dfa.shortest_member().expect("start state is live"));
    }
    let distinct = strings.len();
    while strings.len() < n {
        let w = strings[rng.gen_range(0..distinct)].clone();
        strings.push(w);
    }
    Ok(Sample { strings, exhausted })
}
