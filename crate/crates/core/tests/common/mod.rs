//! Shared strategies and brute-force reference implementations.
#![allow(dead_code)]

use proptest::prelude::*;

use sketchregex::examplegen::Examples;
use sketchregex::regex::{BinaryOp, CharClass, Count, Regex, UnaryOp};

/// Four symbols that between them hit every character class.
pub const SUB_ALPHABET: [char; 4] = ['a', 'Z', '7', '.'];

/// Class membership written out by hand, independent of the library tables.
pub fn class_has(c: CharClass, ch: char) -> bool {
    let printable = (' '..='~').contains(&ch);
    match c {
        CharClass::Let => ch.is_ascii_alphabetic(),
        CharClass::Vow => matches!(ch, 'a' | 'e' | 'i' | 'o' | 'u' | 'A' | 'E' | 'I' | 'O' | 'U'),
        CharClass::Cap => ch.is_ascii_uppercase(),
        CharClass::Low => ch.is_ascii_lowercase(),
        CharClass::Num => ch.is_ascii_digit(),
        CharClass::AlphaNum => ch.is_ascii_alphanumeric(),
        CharClass::Hex => ch.is_ascii_digit() || ('a'..='f').contains(&ch) || ('A'..='F').contains(&ch),
        CharClass::Spec => printable && !ch.is_ascii_alphanumeric() && ch != ' ',
        CharClass::Any => printable,
        CharClass::Eps | CharClass::Null => false,
    }
}

/// `w` splits into exactly `j` consecutive pieces, each accepted by `r`.
fn pieces(r: &Regex, w: &[char], j: u32) -> bool {
    if j == 0 {
        return w.is_empty();
    }
    (0..=w.len()).any(|i| oracle(r, &w[..i]) && pieces(r, &w[i..], j - 1))
}

/// Set semantics evaluated directly on the string, by exhaustive splitting.
pub fn oracle(r: &Regex, w: &[char]) -> bool {
    let n = w.len();
    match r {
        Regex::Class(CharClass::Eps) => n == 0,
        Regex::Class(CharClass::Null) => false,
        Regex::Class(c) => n == 1 && class_has(*c, w[0]),
        Regex::Lit(c) => n == 1 && w[0] == *c,
        Regex::Unary(op, a) => match op {
            UnaryOp::Not => !oracle(a, w),
            UnaryOp::Optional => n == 0 || oracle(a, w),
            UnaryOp::StartsWith => (0..=n).any(|i| oracle(a, &w[..i])),
            UnaryOp::EndsWith => (0..=n).any(|i| oracle(a, &w[i..])),
            UnaryOp::Contains => (0..=n).any(|i| (i..=n).any(|j| oracle(a, &w[i..j]))),
            // more than n pieces would need empty ones, which add nothing
            UnaryOp::KleeneStar => (0..=n as u32).any(|j| pieces(a, w, j)),
        },
        Regex::Binary(op, a, b) => match op {
            BinaryOp::Concat => (0..=n).any(|i| oracle(a, &w[..i]) && oracle(b, &w[i..])),
            BinaryOp::Or => oracle(a, w) || oracle(b, w),
            BinaryOp::And => oracle(a, w) && oracle(b, w),
        },
        Regex::Repeat(a, k) => match *k {
            Count::Exactly(k) => pieces(a, w, k),
            Count::AtLeast(k) => (k..=k + n as u32).any(|j| pieces(a, w, j)),
            Count::Range(lo, hi) => (lo..=hi).any(|j| pieces(a, w, j)),
        },
    }
}

pub fn oracle_str(r: &Regex, w: &str) -> bool {
    oracle(r, &w.chars().collect::<Vec<_>>())
}

/// Every string over `alphabet` of length at most `max_len`.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| alphabet.iter().map(move |c| format!("{s}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn count(max: u32) -> impl Strategy<Value = Count> {
    prop_oneof![
        (1..=max).prop_map(Count::Exactly),
        (1..=max).prop_map(Count::AtLeast),
        (1..=max, 0..max).prop_map(move |(lo, d)| Count::Range(lo, (lo + d).min(max))),
    ]
}

pub fn leaf(with_eps_null: bool) -> BoxedStrategy<Regex> {
    let classes: Vec<CharClass> = if with_eps_null {
        CharClass::ALL.to_vec()
    } else {
        CharClass::CHARACTER_CLASSES.to_vec()
    };
    prop_oneof![
        3 => proptest::sample::select(classes).prop_map(Regex::Class),
        1 => proptest::sample::select(SUB_ALPHABET.to_vec()).prop_map(Regex::Lit),
    ]
    .boxed()
}

/// Random regexes of depth at most `depth` (a leaf has depth 1).
pub fn regex(depth: u32, with_and_not: bool) -> BoxedStrategy<Regex> {
    regex_with_counts(depth, with_and_not, 3)
}

/// As [`regex`], with repetition counts at most `max_count`.
pub fn regex_with_counts(depth: u32, with_and_not: bool, max_count: u32) -> BoxedStrategy<Regex> {
    let unary: Vec<UnaryOp> = UnaryOp::ALL
        .into_iter()
        .filter(|op| with_and_not || *op != UnaryOp::Not)
        .collect();
    let binary: Vec<BinaryOp> = BinaryOp::ALL
        .into_iter()
        .filter(|op| with_and_not || *op != BinaryOp::And)
        .collect();
    leaf(true)
        .prop_recursive(depth.saturating_sub(1), 64, 2, move |inner| {
            prop_oneof![
                (proptest::sample::select(unary.clone()), inner.clone()).prop_map(|(op, a)| Regex::unary(op, a)),
                (proptest::sample::select(binary.clone()), inner.clone(), inner.clone())
                    .prop_map(|(op, a, b)| Regex::binary(op, a, b)),
                (inner, count(max_count)).prop_map(|(a, k)| Regex::repeat(a, k)),
            ]
        })
        .boxed()
}

/// Regexes of the reduced DSL: terminals <num> and <let>; Concat, Or and
/// Repeat with counts from `ints`; depth at most `depth`.
pub fn enumerate_reduced(depth: usize, ints: &[u32]) -> Vec<Regex> {
    let mut levels: Vec<Vec<Regex>> = vec![vec![Regex::Class(CharClass::Num), Regex::Class(CharClass::Let)]];
    for _ in 1..depth {
        let below: Vec<Regex> = levels.iter().flatten().cloned().collect();
        let prev_depth = levels.last().unwrap().clone();
        let mut next = vec![];
        // one child at exactly the previous depth keeps each tree at one level
        for a in &below {
            for b in &below {
                if prev_depth.contains(a) || prev_depth.contains(b) {
                    next.push(Regex::concat(a.clone(), b.clone()));
                    next.push(Regex::or(a.clone(), b.clone()));
                }
            }
        }
        for a in &prev_depth {
            for &k in ints {
                next.push(Regex::repeat(a.clone(), Count::Exactly(k)));
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

pub fn oracle_consistent(r: &Regex, ex: &Examples) -> bool {
    ex.positives.iter().all(|p| oracle_str(r, p)) && ex.negatives.iter().all(|n| !oracle_str(r, n))
}

/// Random disjoint example sets over a digits-and-letters alphabet.
pub fn example_set() -> impl Strategy<Value = Examples> {
    let word = proptest::collection::vec(proptest::sample::select(vec!['1', '2', 'a', 'b']), 1..=4)
        .prop_map(|cs| cs.into_iter().collect::<String>());
    (
        proptest::collection::btree_set(word.clone(), 1..=3),
        proptest::collection::btree_set(word, 1..=3),
    )
        .prop_filter("disjoint", |(p, n)| p.is_disjoint(n))
        .prop_map(|(p, n)| Examples::new(p, n))
}
