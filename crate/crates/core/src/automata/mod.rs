//! Semantics of the regex DSL.
//!
//! Automata are built from Brzozowski derivatives over normalized terms, so
//! intersection and complement are handled structurally. The alphabet is
//! split into blocks of characters that no character set in the regex
//! distinguishes, and transitions are stored per block.

mod deriv;
mod sample;

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::regex::{CharSet, Regex};

pub(crate) use deriv::Re;
pub use sample::{sample_strings, Sample, MAX_SAMPLE_LENGTH};

/// Default cap on the number of automaton states explored.
pub const DEFAULT_STATE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("character {0:?} is outside the alphabet")]
    OutOfAlphabet(char),
    #[error("automaton exceeded the state limit of {0}")]
    StateLimit(usize),
    #[error("the language is empty")]
    EmptyLanguage,
}

/// A total deterministic automaton over the printable-ASCII alphabet.
///
/// State 0 is the start state. Every state has one transition per alphabet
/// block.
#[derive(Debug, Clone)]
pub struct Dfa {
    blocks: Vec<CharSet>,
    transitions: Vec<Vec<usize>>,
    accepting: Vec<bool>,
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// The alphabet partition used for transitions.
    pub fn blocks(&self) -> &[CharSet] {
        &self.blocks
    }

    /// Target of the transition from `state` on block `block`.
    pub fn target(&self, state: usize, block: usize) -> usize {
        self.transitions[state][block]
    }

    pub fn block_of(&self, c: char) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(c))
    }

    pub fn step(&self, state: usize, c: char) -> Result<usize, AutomataError> {
        let block = self.block_of(c).ok_or(AutomataError::OutOfAlphabet(c))?;
        Ok(self.transitions[state][block])
    }

    pub fn accepts(&self, w: &str) -> Result<bool, AutomataError> {
        let mut state = self.start();
        for c in w.chars() {
            state = self.step(state, c)?;
        }
        Ok(self.accepting[state])
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds = vec![vec![]; n];
        for (s, row) in self.transitions.iter().enumerate() {
            for &t in row {
                preds[t].push(s);
            }
        }
        let mut live = self.accepting.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &s in &preds[t] {
                if !live[s] {
                    live[s] = true;
                    queue.push_back(s);
                }
            }
        }
        live
    }

    pub fn is_empty(&self) -> bool {
        !self.live_states()[self.start()]
    }

    /// A shortest accepted string, if the language is nonempty.
    pub fn shortest_member(&self) -> Option<String> {
        let mut parent: Vec<Option<(usize, char)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.start()]);
        seen[self.start()] = true;
        while let Some(s) = queue.pop_front() {
            if self.accepting[s] {
                let mut out = vec![];
                let mut cur = s;
                while let Some((p, c)) = parent[cur] {
                    out.push(c);
                    cur = p;
                }
                return Some(out.into_iter().rev().collect());
            }
            for (b, &t) in self.transitions[s].iter().enumerate() {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, self.blocks[b].first().unwrap()));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Graphviz rendering for debugging.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n  start -> s0;\n");
        for s in 0..self.num_states() {
            let shape = if self.accepting[s] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{s} [shape={shape}];");
        }
        for (s, row) in self.transitions.iter().enumerate() {
            let mut by_target: Vec<(usize, CharSet)> = vec![];
            for (b, &t) in row.iter().enumerate() {
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, set)) => *set = set.union(self.blocks[b]),
                    None => by_target.push((t, self.blocks[b])),
                }
            }
            for (t, set) in by_target {
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", dot_label(set));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn dot_label(set: CharSet) -> String {
    if set == CharSet::ALL {
        return "any".into();
    }
    let chars: String = set.chars().collect();
    let shown: String = if chars.len() > 12 {
        format!("{}...({})", &chars[..10], set.len())
    } else {
        chars
    };
    shown.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Interns derivative terms as state ids.
struct StateTable {
    ids: HashMap<Re, usize>,
    terms: Vec<Re>,
    limit: usize,
}

impl StateTable {
    fn new(limit: usize) -> StateTable {
        StateTable {
            ids: HashMap::new(),
            terms: vec![],
            limit,
        }
    }

    /// Returns the id and whether the term is new.
    fn intern(&mut self, term: Re) -> Result<(usize, bool), AutomataError> {
        if let Some(&id) = self.ids.get(&term) {
            return Ok((id, false));
        }
        if self.terms.len() >= self.limit {
            return Err(AutomataError::StateLimit(self.limit));
        }
        let id = self.terms.len();
        self.ids.insert(term.clone(), id);
        self.terms.push(term);
        Ok((id, true))
    }
}

fn blocks_for(terms: &[&Re]) -> Vec<CharSet> {
    let mut sets = vec![];
    for t in terms {
        t.char_sets(&mut sets);
    }
    deriv::partition(&sets)
}

pub fn build_dfa(r: &Regex) -> Result<Dfa, AutomataError> {
    build_dfa_with_limit(r, DEFAULT_STATE_LIMIT)
}

pub fn build_dfa_with_limit(r: &Regex, limit: usize) -> Result<Dfa, AutomataError> {
    build_from_term(Re::from_regex(r), limit)
}

pub(crate) fn build_from_term(root: Re, limit: usize) -> Result<Dfa, AutomataError> {
    let blocks = blocks_for(&[&root]);
    let reps: Vec<char> = blocks.iter().map(|b| b.first().unwrap()).collect();
    let mut table = StateTable::new(limit);
    table.intern(root)?;
    let mut transitions: Vec<Vec<usize>> = vec![];
    let mut next = 0;
    while next < table.terms.len() {
        let term = table.terms[next].clone();
        let row = reps
            .iter()
            .map(|&c| table.intern(term.deriv(c)).map(|(id, _)| id))
            .collect::<Result<Vec<_>, _>>()?;
        transitions.push(row);
        next += 1;
    }
    let accepting = table.terms.iter().map(Re::nullable).collect();
    Ok(Dfa {
        blocks,
        transitions,
        accepting,
    })
}

/// Membership tester that explores derivative states on demand and caches
/// the transitions it has taken. Reusing one matcher across many strings
/// amortizes the derivative computations.
pub struct Matcher {
    table: StateTable,
    nullable: Vec<bool>,
    steps: HashMap<(usize, char), usize>,
}

impl Matcher {
    pub fn new(r: &Regex) -> Matcher {
        Matcher::from_term(Re::from_regex(r))
    }

    pub(crate) fn from_term(term: Re) -> Matcher {
        let mut table = StateTable::new(DEFAULT_STATE_LIMIT);
        let nullable = vec![term.nullable()];
        table.intern(term).expect("empty table has room");
        Matcher {
            table,
            nullable,
            steps: HashMap::new(),
        }
    }

    pub fn matches(&mut self, w: &str) -> Result<bool, AutomataError> {
        let mut state = 0;
        for c in w.chars() {
            if !crate::regex::in_alphabet(c) {
                return Err(AutomataError::OutOfAlphabet(c));
            }
            state = match self.steps.get(&(state, c)) {
                Some(&t) => t,
                None => {
                    let d = self.table.terms[state].deriv(c);
                    let (t, fresh) = self.table.intern(d)?;
                    if fresh {
                        self.nullable.push(self.table.terms[t].nullable());
                    }
                    self.steps.insert((state, c), t);
                    t
                }
            };
        }
        Ok(self.nullable[state])
    }
}

/// Whether `w` is in the language of `r`.
pub fn matches(r: &Regex, w: &str) -> Result<bool, AutomataError> {
    Matcher::new(r).matches(w)
}

/// Whether the language of `r` is empty. Stops at the first accepting state.
pub fn is_empty(r: &Regex) -> Result<bool, AutomataError> {
    term_is_empty(Re::from_regex(r), DEFAULT_STATE_LIMIT)
}

pub(crate) fn term_is_empty(root: Re, limit: usize) -> Result<bool, AutomataError> {
    let reps: Vec<char> = blocks_for(&[&root]).iter().map(|b| b.first().unwrap()).collect();
    let mut table = StateTable::new(limit);
    table.intern(root)?;
    let mut next = 0;
    while next < table.terms.len() {
        let term = table.terms[next].clone();
        if term.nullable() {
            return Ok(false);
        }
        for &c in &reps {
            table.intern(term.deriv(c))?;
        }
        next += 1;
    }
    Ok(true)
}

/// A shortest string accepted by exactly one of `a` and `b`, or `None` when
/// the two regexes denote the same language.
pub fn distinguishing_string(a: &Regex, b: &Regex) -> Result<Option<String>, AutomataError> {
    let (ta, tb) = (Re::from_regex(a), Re::from_regex(b));
    let blocks = blocks_for(&[&ta, &tb]);
    let reps: Vec<char> = blocks.iter().map(|b| b.first().unwrap()).collect();
    let mut left = StateTable::new(DEFAULT_STATE_LIMIT);
    let mut right = StateTable::new(DEFAULT_STATE_LIMIT);
    let start = (left.intern(ta)?.0, right.intern(tb)?.0);
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), char)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(pair) = queue.pop_front() {
        let (x, y) = (left.terms[pair.0].clone(), right.terms[pair.1].clone());
        if x.nullable() != y.nullable() {
            let mut out = vec![];
            let mut cur = pair;
            while let Some(Some((p, c))) = parent.get(&cur) {
                out.push(*c);
                cur = *p;
            }
            return Ok(Some(out.into_iter().rev().collect()));
        }
        for &c in &reps {
            let next = (left.intern(x.deriv(c))?.0, right.intern(y.deriv(c))?.0);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((pair, c)));
                queue.push_back(next);
            }
            if parent.len() > DEFAULT_STATE_LIMIT {
                return Err(AutomataError::StateLimit(DEFAULT_STATE_LIMIT));
            }
        }
    }
    Ok(None)
}

/// Language equivalence, decided on the product of the two derivative automata.
pub fn equivalent(a: &Regex, b: &Regex) -> Result<bool, AutomataError> {
    Ok(distinguishing_string(a, b)?.is_none())
}
