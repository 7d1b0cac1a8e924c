//! Example-relative semantics.
//!
//! Every DSL operator decides membership of a string from membership of its
//! infixes, so a regex is fully characterized, as far as a set of examples is
//! concerned, by which infixes of those examples it accepts. A [`Sig`] stores
//! that as one bit row per (example, start position): bit `j` of row `i` is
//! set when `s[i..j]` is accepted.

use std::hash::{Hash, Hasher};

use crate::regex::{CharSet, Count};

type Row = u128;

/// Examples longer than this cannot be represented in a row.
pub const MAX_EXAMPLE_LEN: usize = Row::BITS as usize - 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sig(Box<[Row]>);

impl Hash for Sig {
    // signatures are interned by the thousands; fold the rows into one word
    // so the map's hasher only sees eight bytes
    fn hash<H: Hasher>(&self, state: &mut H) {
        let folded = self.0.iter().fold(0u64, |acc, &r| {
            let mixed = (acc ^ r as u64 ^ (r >> 64) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            mixed.rotate_left(29)
        });
        state.write_u64(folded);
    }
}

pub struct InfixTable {
    strings: Vec<Vec<char>>,
    offsets: Vec<usize>,
    n_pos: usize,
    full: Sig,
    eps: Sig,
}

impl InfixTable {
    /// Positives come first, then negatives. Every string must be at most
    /// [`MAX_EXAMPLE_LEN`] characters.
    pub fn new(positives: &[String], negatives: &[String]) -> InfixTable {
        let strings: Vec<Vec<char>> = positives
            .iter()
            .chain(negatives)
            .map(|s| s.chars().collect())
            .collect();
        let mut offsets = vec![];
        let mut rows = 0;
        for s in &strings {
            assert!(s.len() <= MAX_EXAMPLE_LEN);
            offsets.push(rows);
            rows += s.len() + 1;
        }
        let mut table = InfixTable {
            strings,
            offsets,
            n_pos: positives.len(),
            full: Sig(vec![0; rows].into()),
            eps: Sig(vec![0; rows].into()),
        };
        table.full = table.build(|_, i, n| (i..=n).fold(0, |acc, j| acc | bit(j)));
        table.eps = table.build(|_, i, _| bit(i));
        table
    }

    fn build(&self, mut row: impl FnMut(&[char], usize, usize) -> Row) -> Sig {
        let mut rows = Vec::with_capacity(self.full.0.len());
        for s in &self.strings {
            for i in 0..=s.len() {
                rows.push(row(s, i, s.len()));
            }
        }
        Sig(rows.into())
    }

    pub fn full(&self) -> Sig {
        self.full.clone()
    }

    pub fn empty(&self) -> Sig {
        Sig(vec![0; self.full.0.len()].into())
    }

    pub fn eps(&self) -> Sig {
        self.eps.clone()
    }

    pub fn chars(&self, set: CharSet) -> Sig {
        self.build(|s, i, n| {
            if i < n && set.contains(s[i]) {
                bit(i + 1)
            } else {
                0
            }
        })
    }

    pub fn or(&self, a: &Sig, b: &Sig) -> Sig {
        Sig(a.0.iter().zip(b.0.iter()).map(|(x, y)| x | y).collect())
    }

    pub fn and(&self, a: &Sig, b: &Sig) -> Sig {
        Sig(a.0.iter().zip(b.0.iter()).map(|(x, y)| x & y).collect())
    }

    pub fn not(&self, a: &Sig) -> Sig {
        Sig(a.0.iter().zip(self.full.0.iter()).map(|(x, f)| f & !x).collect())
    }

    pub fn concat(&self, a: &Sig, b: &Sig) -> Sig {
        let mut out = vec![0; a.0.len()];
        for (k, s) in self.strings.iter().enumerate() {
            let base = self.offsets[k];
            for i in 0..=s.len() {
                let mut mids = a.0[base + i];
                let mut acc = 0;
                while mids != 0 {
                    let m = mids.trailing_zeros() as usize;
                    mids &= mids - 1;
                    acc |= b.0[base + m];
                }
                out[base + i] = acc;
            }
        }
        Sig(out.into())
    }

    /// Concatenation with the universal language on the right.
    pub fn starts_with(&self, a: &Sig) -> Sig {
        let mut out = vec![0; a.0.len()];
        for (k, s) in self.strings.iter().enumerate() {
            let base = self.offsets[k];
            let n = s.len();
            for i in 0..=n {
                let r = a.0[base + i];
                if r != 0 {
                    out[base + i] = self.full.0[base + r.trailing_zeros() as usize];
                }
            }
        }
        Sig(out.into())
    }

    /// Concatenation with the universal language on the left.
    pub fn ends_with(&self, a: &Sig) -> Sig {
        let mut out = vec![0; a.0.len()];
        for (k, s) in self.strings.iter().enumerate() {
            let base = self.offsets[k];
            let mut acc = 0;
            for i in (0..=s.len()).rev() {
                acc |= a.0[base + i];
                out[base + i] = acc;
            }
        }
        Sig(out.into())
    }

    pub fn star(&self, a: &Sig) -> Sig {
        let mut out = vec![0; a.0.len()];
        for (k, s) in self.strings.iter().enumerate() {
            let base = self.offsets[k];
            for i in (0..=s.len()).rev() {
                // nonempty first step, then any number of further steps
                let mut mids = a.0[base + i] & !bit(i);
                let mut acc = bit(i);
                while mids != 0 {
                    let m = mids.trailing_zeros() as usize;
                    mids &= mids - 1;
                    acc |= out[base + m];
                }
                out[base + i] = acc;
            }
        }
        Sig(out.into())
    }

    fn power(&self, a: &Sig, n: u32) -> Sig {
        (0..n).fold(self.eps(), |acc, _| self.concat(&acc, a))
    }

    pub fn repeat(&self, a: &Sig, k: Count) -> Sig {
        match k {
            Count::Exactly(n) => self.power(a, n),
            Count::AtLeast(n) => self.concat(&self.power(a, n), &self.star(a)),
            Count::Range(lo, hi) => {
                let mut p = self.power(a, lo);
                let mut acc = p.clone();
                for _ in lo..hi {
                    p = self.concat(&p, a);
                    acc = self.or(&acc, &p);
                }
                acc
            }
        }
    }

    fn accepts_whole(&self, a: &Sig, k: usize) -> bool {
        a.0[self.offsets[k]] & bit(self.strings[k].len()) != 0
    }

    /// Every positive example is accepted.
    pub fn accepts_positives(&self, a: &Sig) -> bool {
        (0..self.n_pos).all(|k| self.accepts_whole(a, k))
    }

    /// Every negative example is rejected.
    pub fn rejects_negatives(&self, a: &Sig) -> bool {
        (self.n_pos..self.strings.len()).all(|k| !self.accepts_whole(a, k))
    }
}

fn bit(j: usize) -> Row {
    1 << j
}
