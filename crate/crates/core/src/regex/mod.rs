//! Regex and sketch syntax trees.
//!
//! A [`Regex`] is a concrete program of the regex DSL. A [`Sketch`] is the
//! same tree extended with constrained holes `?{S1,...,Sm}`; a sketch with no
//! holes is concrete and converts losslessly to a regex.

mod charclass;
mod parse;
mod print;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use charclass::{alphabet, in_alphabet, CharClass, CharSet, ALPHABET_SIZE};
pub use parse::{parse_regex, parse_sketch, ParseError};
pub use print::to_standard_regex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnaryOp {
    StartsWith,
    EndsWith,
    Contains,
    Not,
    Optional,
    KleeneStar,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 6] = [
        UnaryOp::StartsWith,
        UnaryOp::EndsWith,
        UnaryOp::Contains,
        UnaryOp::Not,
        UnaryOp::Optional,
        UnaryOp::KleeneStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::StartsWith => "StartsWith",
            UnaryOp::EndsWith => "EndsWith",
            UnaryOp::Contains => "Contains",
            UnaryOp::Not => "Not",
            UnaryOp::Optional => "Optional",
            UnaryOp::KleeneStar => "KleeneStar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryOp {
    Concat,
    And,
    Or,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 3] = [BinaryOp::Concat, BinaryOp::And, BinaryOp::Or];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Concat => "Concat",
            BinaryOp::And => "And",
            BinaryOp::Or => "Or",
        }
    }
}

/// Repetition bounds. All counts are at least 1 and ranges satisfy `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Count {
    Exactly(u32),
    AtLeast(u32),
    Range(u32, u32),
}

impl Count {
    pub fn is_valid(self) -> bool {
        match self {
            Count::Exactly(k) | Count::AtLeast(k) => k >= 1,
            Count::Range(lo, hi) => lo >= 1 && lo <= hi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Count::Exactly(_) => "Repeat",
            Count::AtLeast(_) => "RepeatAtLeast",
            Count::Range(..) => "RepeatRange",
        }
    }

    /// Integer parameters in argument order.
    pub fn params(self) -> Vec<u32> {
        match self {
            Count::Exactly(k) | Count::AtLeast(k) => vec![k],
            Count::Range(lo, hi) => vec![lo, hi],
        }
    }
}

/// A concrete regex of the DSL.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Class(CharClass),
    Lit(char),
    Unary(UnaryOp, Box<Regex>),
    Binary(BinaryOp, Box<Regex>, Box<Regex>),
    Repeat(Box<Regex>, Count),
}

/// A regex with constrained holes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sketch {
    Hole(Vec<Sketch>),
    Class(CharClass),
    Lit(char),
    Unary(UnaryOp, Box<Sketch>),
    Binary(BinaryOp, Box<Sketch>, Box<Sketch>),
    Repeat(Box<Sketch>, Count),
}

impl Regex {
    pub fn class(c: CharClass) -> Regex {
        Regex::Class(c)
    }

    pub fn unary(op: UnaryOp, r: Regex) -> Regex {
        Regex::Unary(op, Box::new(r))
    }

    pub fn binary(op: BinaryOp, a: Regex, b: Regex) -> Regex {
        Regex::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::binary(BinaryOp::Concat, a, b)
    }

    pub fn or(a: Regex, b: Regex) -> Regex {
        Regex::binary(BinaryOp::Or, a, b)
    }

    pub fn and(a: Regex, b: Regex) -> Regex {
        Regex::binary(BinaryOp::And, a, b)
    }

    pub fn not(r: Regex) -> Regex {
        Regex::unary(UnaryOp::Not, r)
    }

    pub fn repeat(r: Regex, count: Count) -> Regex {
        debug_assert!(count.is_valid());
        Regex::Repeat(Box::new(r), count)
    }

    /// Right-nested concatenation of single-character literals; the empty
    /// string maps to `<eps>`.
    pub fn literal(s: &str) -> Regex {
        let mut chars: Vec<char> = s.chars().collect();
        let Some(last) = chars.pop() else {
            return Regex::Class(CharClass::Eps);
        };
        chars
            .into_iter()
            .rev()
            .fold(Regex::Lit(last), |acc, c| Regex::concat(Regex::Lit(c), acc))
    }

    pub fn to_sketch(&self) -> Sketch {
        match self {
            Regex::Class(c) => Sketch::Class(*c),
            Regex::Lit(c) => Sketch::Lit(*c),
            Regex::Unary(op, r) => Sketch::Unary(*op, Box::new(r.to_sketch())),
            Regex::Binary(op, a, b) => {
                Sketch::Binary(*op, Box::new(a.to_sketch()), Box::new(b.to_sketch()))
            }
            Regex::Repeat(r, k) => Sketch::Repeat(Box::new(r.to_sketch()), *k),
        }
    }

    pub fn children(&self) -> Vec<&Regex> {
        match self {
            Regex::Class(_) | Regex::Lit(_) => vec![],
            Regex::Unary(_, r) | Regex::Repeat(r, _) => vec![r],
            Regex::Binary(_, a, b) => vec![a, b],
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Regex::size).sum::<usize>()
    }

    /// Longest root-to-leaf path, leaves at depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Regex::depth).max().unwrap_or(0)
    }

    /// Preorder traversal of all subtrees including `self`.
    pub fn subtrees(&self) -> Vec<&Regex> {
        let mut out = vec![];
        let mut stack = vec![self];
        while let Some(r) = stack.pop() {
            out.push(r);
            stack.extend(r.children().into_iter().rev());
        }
        out
    }

    /// Integer parameters used anywhere in the tree.
    pub fn integers(&self) -> Vec<u32> {
        self.subtrees()
            .into_iter()
            .filter_map(|r| match r {
                Regex::Repeat(_, k) => Some(k.params()),
                _ => None,
            })
            .flatten()
            .collect()
    }
}

impl Sketch {
    pub fn hole(components: Vec<Sketch>) -> Sketch {
        Sketch::Hole(components)
    }

    pub fn empty_hole() -> Sketch {
        Sketch::Hole(vec![])
    }

    pub fn unary(op: UnaryOp, s: Sketch) -> Sketch {
        Sketch::Unary(op, Box::new(s))
    }

    pub fn binary(op: BinaryOp, a: Sketch, b: Sketch) -> Sketch {
        Sketch::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn repeat(s: Sketch, count: Count) -> Sketch {
        Sketch::Repeat(Box::new(s), count)
    }

    pub fn is_concrete(&self) -> bool {
        match self {
            Sketch::Hole(_) => false,
            Sketch::Class(_) | Sketch::Lit(_) => true,
            Sketch::Unary(_, s) | Sketch::Repeat(s, _) => s.is_concrete(),
            Sketch::Binary(_, a, b) => a.is_concrete() && b.is_concrete(),
        }
    }

    /// Converts a hole-free sketch to a regex.
    pub fn to_regex(&self) -> Option<Regex> {
        Some(match self {
            Sketch::Hole(_) => return None,
            Sketch::Class(c) => Regex::Class(*c),
            Sketch::Lit(c) => Regex::Lit(*c),
            Sketch::Unary(op, s) => Regex::Unary(*op, Box::new(s.to_regex()?)),
            Sketch::Binary(op, a, b) => {
                Regex::Binary(*op, Box::new(a.to_regex()?), Box::new(b.to_regex()?))
            }
            Sketch::Repeat(s, k) => Regex::Repeat(Box::new(s.to_regex()?), *k),
        })
    }

    /// Children in the tree; hole components count as children of the hole.
    pub fn children(&self) -> Vec<&Sketch> {
        match self {
            Sketch::Hole(cs) => cs.iter().collect(),
            Sketch::Class(_) | Sketch::Lit(_) => vec![],
            Sketch::Unary(_, s) | Sketch::Repeat(s, _) => vec![s],
            Sketch::Binary(_, a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Sketch::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Sketch::depth).max().unwrap_or(0)
    }

    /// Node count where each hole is a single leaf regardless of its components.
    pub fn skeleton_size(&self) -> usize {
        match self {
            Sketch::Hole(_) => 1,
            s => 1 + s.children().into_iter().map(Sketch::skeleton_size).sum::<usize>(),
        }
    }

    /// Depth where each hole is a single leaf regardless of its components.
    pub fn skeleton_depth(&self) -> usize {
        match self {
            Sketch::Hole(_) => 1,
            s => {
                1 + s
                    .children()
                    .into_iter()
                    .map(Sketch::skeleton_depth)
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    pub fn hole_count(&self) -> usize {
        match self {
            Sketch::Hole(cs) => 1 + cs.iter().map(Sketch::hole_count).sum::<usize>(),
            s => s.children().into_iter().map(Sketch::hole_count).sum(),
        }
    }

    /// Components of every hole in the tree, recursively, in preorder.
    pub fn hole_components(&self) -> Vec<&Sketch> {
        let mut out = vec![];
        self.collect_components(&mut out);
        out
    }

    fn collect_components<'a>(&'a self, out: &mut Vec<&'a Sketch>) {
        if let Sketch::Hole(cs) = self {
            out.extend(cs.iter());
        }
        for c in self.children() {
            c.collect_components(out);
        }
    }

    /// Integer parameters used anywhere, including inside hole components.
    pub fn integers(&self) -> Vec<u32> {
        let mut out = vec![];
        if let Sketch::Repeat(_, k) = self {
            out.extend(k.params());
        }
        for c in self.children() {
            out.extend(c.integers());
        }
        out
    }

    /// Literal characters used anywhere, including inside hole components.
    pub fn literals(&self) -> Vec<char> {
        let mut out = vec![];
        if let Sketch::Lit(c) = self {
            out.push(*c);
        }
        for c in self.children() {
            out.extend(c.literals());
        }
        out
    }

    /// True when the root node of `self` and `r` carry the same constructor
    /// and parameters. Holes never agree with a regex head.
    fn same_head(&self, r: &Regex) -> bool {
        match (self, r) {
            (Sketch::Class(a), Regex::Class(b)) => a == b,
            (Sketch::Lit(a), Regex::Lit(b)) => a == b,
            (Sketch::Unary(a, _), Regex::Unary(b, _)) => a == b,
            (Sketch::Binary(a, ..), Regex::Binary(b, ..)) => a == b,
            (Sketch::Repeat(_, a), Regex::Repeat(_, b)) => a == b,
            _ => false,
        }
    }
}

impl From<&Regex> for Sketch {
    fn from(r: &Regex) -> Sketch {
        r.to_sketch()
    }
}

impl From<Regex> for Sketch {
    fn from(r: Regex) -> Sketch {
        r.to_sketch()
    }
}

/// Whether the concrete regex `r` lies in the space of regexes defined by `s`.
///
/// A hole with no components admits anything. A hole with components admits
/// `r` when some subtree of `r` (including `r` itself) is admitted by at
/// least one component. Any other node must agree with `r`'s root and admit
/// `r`'s children positionally.
pub fn sketch_matches(s: &Sketch, r: &Regex) -> bool {
    match s {
        Sketch::Hole(cs) if cs.is_empty() => true,
        Sketch::Hole(cs) => r
            .subtrees()
            .into_iter()
            .any(|t| cs.iter().any(|c| sketch_matches(c, t))),
        _ => {
            s.same_head(r)
                && s
                    .children()
                    .into_iter()
                    .zip(r.children())
                    .all(|(sc, rc)| sketch_matches(sc, rc))
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_sketch(f, &self.to_sketch())
    }
}

impl fmt::Display for Sketch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_sketch(f, self)
    }
}
