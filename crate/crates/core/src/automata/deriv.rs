//! Extended regular expressions with Brzozowski derivatives.
//!
//! Terms are kept in a normal form by the smart constructors below: `Or` and
//! `And` are flattened, sorted and deduplicated with character sets merged,
//! concatenation is right-associated, double negation cancels, and the unit
//! and zero laws for `Eps`/`Null` are applied. The derivative closure of a
//! term is finite modulo this normal form.

use std::rc::Rc;

use crate::regex::{BinaryOp, CharClass, CharSet, Count, Regex, UnaryOp};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Re {
    Null,
    Eps,
    Set(CharSet),
    Cat(Rc<Re>, Rc<Re>),
    Star(Rc<Re>),
    Or(Rc<[Re]>),
    And(Rc<[Re]>),
    Not(Rc<Re>),
}

impl Re {
    pub fn universal() -> Re {
        Re::Star(Rc::new(Re::Set(CharSet::ALL)))
    }

    fn is_universal(&self) -> bool {
        matches!(self, Re::Star(x) if **x == Re::Set(CharSet::ALL))
    }

    pub fn set(s: CharSet) -> Re {
        if s.is_empty() {
            Re::Null
        } else {
            Re::Set(s)
        }
    }

    pub fn cat(a: Re, b: Re) -> Re {
        match (a, b) {
            (Re::Null, _) | (_, Re::Null) => Re::Null,
            (Re::Eps, b) => b,
            (a, Re::Eps) => a,
            (Re::Cat(x, y), b) => Re::cat((*x).clone(), Re::cat((*y).clone(), b)),
            (a, b) => Re::Cat(Rc::new(a), Rc::new(b)),
        }
    }

    pub fn star(a: Re) -> Re {
        match a {
            Re::Null | Re::Eps => Re::Eps,
            s @ Re::Star(_) => s,
            a => Re::Star(Rc::new(a)),
        }
    }

    pub fn not(a: Re) -> Re {
        match a {
            Re::Not(x) => (*x).clone(),
            a => Re::Not(Rc::new(a)),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Re>) -> Re {
        let mut flat = vec![];
        let mut chars = CharSet::EMPTY;
        let mut pending: Vec<Re> = items.into_iter().collect();
        while let Some(item) = pending.pop() {
            match item {
                Re::Null => {}
                Re::Set(s) => chars = chars.union(s),
                Re::Or(xs) => pending.extend(xs.iter().cloned()),
                x if x.is_universal() => return x,
                x => flat.push(x),
            }
        }
        if !chars.is_empty() {
            flat.push(Re::Set(chars));
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => Re::Null,
            1 => flat.pop().unwrap(),
            _ => Re::Or(flat.into()),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Re>) -> Re {
        let mut flat = vec![];
        let mut chars: Option<CharSet> = None;
        let mut pending: Vec<Re> = items.into_iter().collect();
        while let Some(item) = pending.pop() {
            match item {
                Re::Null => return Re::Null,
                Re::Set(s) => chars = Some(chars.map_or(s, |c| c.intersect(s))),
                Re::And(xs) => pending.extend(xs.iter().cloned()),
                x if x.is_universal() => {}
                x => flat.push(x),
            }
        }
        if let Some(s) = chars {
            // a single character never equals the empty string
            if s.is_empty() || flat.contains(&Re::Eps) {
                return Re::Null;
            }
            flat.push(Re::Set(s));
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => Re::universal(),
            1 => flat.pop().unwrap(),
            _ => Re::And(flat.into()),
        }
    }

    pub fn nullable(&self) -> bool {
        match self {
            Re::Null | Re::Set(_) => false,
            Re::Eps | Re::Star(_) => true,
            Re::Cat(a, b) => a.nullable() && b.nullable(),
            Re::Or(xs) => xs.iter().any(Re::nullable),
            Re::And(xs) => xs.iter().all(Re::nullable),
            Re::Not(a) => !a.nullable(),
        }
    }

    /// Derivative with respect to the character `c`.
    pub fn deriv(&self, c: char) -> Re {
        match self {
            Re::Null | Re::Eps => Re::Null,
            Re::Set(s) => {
                if s.contains(c) {
                    Re::Eps
                } else {
                    Re::Null
                }
            }
            Re::Cat(a, b) => {
                let head = Re::cat(a.deriv(c), (**b).clone());
                if a.nullable() {
                    Re::or([head, b.deriv(c)])
                } else {
                    head
                }
            }
            Re::Star(a) => Re::cat(a.deriv(c), self.clone()),
            Re::Or(xs) => Re::or(xs.iter().map(|x| x.deriv(c))),
            Re::And(xs) => Re::and(xs.iter().map(|x| x.deriv(c))),
            Re::Not(a) => Re::not(a.deriv(c)),
        }
    }

    /// Every character set mentioned in the term, in first-occurrence order.
    pub fn char_sets(&self, out: &mut Vec<CharSet>) {
        match self {
            Re::Null | Re::Eps => {}
            Re::Set(s) => {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
            Re::Cat(a, b) => {
                a.char_sets(out);
                b.char_sets(out);
            }
            Re::Star(a) | Re::Not(a) => a.char_sets(out),
            Re::Or(xs) | Re::And(xs) => xs.iter().for_each(|x| x.char_sets(out)),
        }
    }

    pub fn from_regex(r: &Regex) -> Re {
        match r {
            Regex::Class(c) => class_term(*c),
            Regex::Lit(c) => Re::set(CharSet::singleton(*c)),
            Regex::Unary(op, x) => unary_term(*op, Re::from_regex(x)),
            Regex::Binary(op, a, b) => {
                binary_term(*op, Re::from_regex(a), Re::from_regex(b))
            }
            Regex::Repeat(x, k) => repeat_term(Re::from_regex(x), *k),
        }
    }
}

fn class_term(c: CharClass) -> Re {
    match c {
        CharClass::Eps => Re::Eps,
        CharClass::Null => Re::Null,
        c => Re::set(c.chars()),
    }
}

fn unary_term(op: UnaryOp, x: Re) -> Re {
    match op {
        UnaryOp::StartsWith => Re::cat(x, Re::universal()),
        UnaryOp::EndsWith => Re::cat(Re::universal(), x),
        UnaryOp::Contains => Re::cat(Re::universal(), Re::cat(x, Re::universal())),
        UnaryOp::Not => Re::not(x),
        UnaryOp::Optional => Re::or([Re::Eps, x]),
        UnaryOp::KleeneStar => Re::star(x),
    }
}

fn binary_term(op: BinaryOp, a: Re, b: Re) -> Re {
    match op {
        BinaryOp::Concat => Re::cat(a, b),
        BinaryOp::And => Re::and([a, b]),
        BinaryOp::Or => Re::or([a, b]),
    }
}

fn power(x: &Re, k: u32) -> Re {
    (0..k).fold(Re::Eps, |acc, _| Re::cat(x.clone(), acc))
}

fn repeat_term(x: Re, k: Count) -> Re {
    match k {
        Count::Exactly(n) => power(&x, n),
        Count::AtLeast(n) => Re::cat(power(&x, n), Re::star(x)),
        Count::Range(lo, hi) => {
            // x{lo} (x (x (...)?)?)? with hi - lo nested optionals
            let tail = (lo..hi).fold(Re::Eps, |acc, _| Re::or([Re::Eps, Re::cat(x.clone(), acc)]));
            Re::cat(power(&x, lo), tail)
        }
    }
}

/// Splits the alphabet into blocks such that every set in `sets` is a union
/// of blocks. Characters in one block have identical derivatives for any
/// term built from those sets.
pub(crate) fn partition(sets: &[CharSet]) -> Vec<CharSet> {
    let mut blocks = vec![CharSet::ALL];
    for &s in sets {
        blocks = blocks
            .into_iter()
            .flat_map(|b| [b.intersect(s), b.intersect(s.complement())])
            .filter(|b| !b.is_empty())
            .collect();
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regex::parse_regex;

    fn re(s: &str) -> Re {
        Re::from_regex(&parse_regex(s).unwrap())
    }

    #[test]
    fn normal_form_laws() {
        assert_eq!(re("Or(<num>,<let>)"), re("Or(<let>,<num>)"));
        assert_eq!(re("Or(<num>,<num>)"), re("<num>"));
        assert_eq!(re("And(<vow>,<num>)"), Re::Null);
        assert_eq!(re("Not(Not(<num>))"), re("<num>"));
        assert_eq!(re("Concat(<eps>,<a>)"), re("<a>"));
        assert_eq!(re("Concat(<null>,<a>)"), Re::Null);
        assert_eq!(re("KleeneStar(KleeneStar(<a>))"), re("KleeneStar(<a>)"));
        assert_eq!(re("Concat(Concat(<a>,<b>),<c>)"), re("Concat(<a>,Concat(<b>,<c>))"));
    }

    #[test]
    fn derivative_basics() {
        let r = re("Concat(<num>,<let>)");
        assert_eq!(r.deriv('1'), re("<let>"));
        assert_eq!(r.deriv('a'), Re::Null);
        assert!(re("Optional(<a>)").nullable());
        assert!(re("Not(<a>)").nullable());
        assert!(!re("Not(Optional(<a>))").nullable());
    }

    #[test]
    fn partition_refines_all_sets() {
        let sets = [CharClass::Let.chars(), CharClass::Vow.chars(), CharClass::Num.chars()];
        let blocks = partition(&sets);
        assert_eq!(blocks.len(), 4);
        for b in &blocks {
            for s in &sets {
                assert!(b.is_subset(*s) || b.intersect(*s).is_empty());
            }
        }
        assert_eq!(blocks.iter().map(|b| b.len()).sum::<usize>(), 95);
    }
}
