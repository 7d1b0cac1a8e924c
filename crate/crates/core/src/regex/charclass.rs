use std::fmt;

use serde::{Deserialize, Serialize};

/// First character of the alphabet (space).
pub const ALPHABET_START: char = ' ';
/// Last character of the alphabet (tilde).
pub const ALPHABET_END: char = '~';
/// Number of symbols in the printable-ASCII alphabet.
pub const ALPHABET_SIZE: usize = 95;

/// Returns true if `c` belongs to the configured alphabet (printable ASCII).
pub fn in_alphabet(c: char) -> bool {
    (ALPHABET_START..=ALPHABET_END).contains(&c)
}

/// All alphabet characters in code-point order.
pub fn alphabet() -> impl Iterator<Item = char> + Clone {
    ALPHABET_START..=ALPHABET_END
}

/// A set of alphabet characters stored as a 95-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharSet(u128);

impl CharSet {
    pub const EMPTY: CharSet = CharSet(0);
    pub const ALL: CharSet = CharSet((1u128 << ALPHABET_SIZE) - 1);

    pub fn index_of(c: char) -> Option<usize> {
        in_alphabet(c).then(|| c as usize - ALPHABET_START as usize)
    }

    pub fn singleton(c: char) -> CharSet {
        match Self::index_of(c) {
            Some(i) => CharSet(1u128 << i),
            None => CharSet::EMPTY,
        }
    }

    pub fn from_pred(pred: impl Fn(char) -> bool) -> CharSet {
        alphabet()
            .filter(|&c| pred(c))
            .fold(CharSet::EMPTY, |acc, c| acc.union(CharSet::singleton(c)))
    }

    pub fn contains(self, c: char) -> bool {
        Self::index_of(c).is_some_and(|i| self.0 >> i & 1 == 1)
    }

    pub fn union(self, other: CharSet) -> CharSet {
        CharSet(self.0 | other.0)
    }

    pub fn intersect(self, other: CharSet) -> CharSet {
        CharSet(self.0 & other.0)
    }

    pub fn complement(self) -> CharSet {
        CharSet(!self.0 & Self::ALL.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: CharSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<char> {
        (!self.is_empty())
            .then(|| char::from(ALPHABET_START as u8 + self.0.trailing_zeros() as u8))
    }

    pub fn chars(self) -> impl Iterator<Item = char> {
        alphabet().filter(move |&c| self.contains(c))
    }

    /// The `n`-th member in code-point order.
    pub fn nth(self, n: usize) -> Option<char> {
        self.chars().nth(n)
    }
}

/// The named terminal classes of the regex DSL.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CharClass {
    Let,
    Vow,
    Cap,
    Low,
    Num,
    AlphaNum,
    Hex,
    Spec,
    Any,
    Eps,
    Null,
}

impl CharClass {
    pub const ALL: [CharClass; 11] = [
        CharClass::Let,
        CharClass::Vow,
        CharClass::Cap,
        CharClass::Low,
        CharClass::Num,
        CharClass::AlphaNum,
        CharClass::Hex,
        CharClass::Spec,
        CharClass::Any,
        CharClass::Eps,
        CharClass::Null,
    ];

    /// Classes that denote a nonempty set of single characters.
    pub const CHARACTER_CLASSES: [CharClass; 9] = [
        CharClass::Let,
        CharClass::Vow,
        CharClass::Cap,
        CharClass::Low,
        CharClass::Num,
        CharClass::AlphaNum,
        CharClass::Hex,
        CharClass::Spec,
        CharClass::Any,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CharClass::Let => "let",
            CharClass::Vow => "vow",
            CharClass::Cap => "cap",
            CharClass::Low => "low",
            CharClass::Num => "num",
            CharClass::AlphaNum => "alphanum",
            CharClass::Hex => "hex",
            CharClass::Spec => "spec",
            CharClass::Any => "any",
            CharClass::Eps => "eps",
            CharClass::Null => "null",
        }
    }

    pub fn from_name(name: &str) -> Option<CharClass> {
        CharClass::ALL.into_iter().find(|c| c.name() == name)
    }

    /// The character set this class denotes. `<eps>` and `<null>` denote no
    /// single characters and return the empty set.
    pub fn chars(self) -> CharSet {
        match self {
            CharClass::Let => CharSet::from_pred(|c| c.is_ascii_alphabetic()),
            CharClass::Vow => CharSet::from_pred(|c| "AEIOUaeiou".contains(c)),
            CharClass::Cap => CharSet::from_pred(|c| c.is_ascii_uppercase()),
            CharClass::Low => CharSet::from_pred(|c| c.is_ascii_lowercase()),
            CharClass::Num => CharSet::from_pred(|c| c.is_ascii_digit()),
            CharClass::AlphaNum => CharSet::from_pred(|c| c.is_ascii_alphanumeric()),
            CharClass::Hex => CharSet::from_pred(|c| c.is_ascii_hexdigit()),
            CharClass::Spec => CharSet::from_pred(|c| !c.is_ascii_alphanumeric() && c != ' '),
            CharClass::Any => CharSet::ALL,
            CharClass::Eps | CharClass::Null => CharSet::EMPTY,
        }
    }

    /// Standard-regex rendering of this class.
    pub fn standard(self) -> &'static str {
        match self {
            CharClass::Let => "[A-Za-z]",
            CharClass::Vow => "[AEIOUaeiou]",
            CharClass::Cap => "[A-Z]",
            CharClass::Low => "[a-z]",
            CharClass::Num => "[0-9]",
            CharClass::AlphaNum => "[A-Za-z0-9]",
            CharClass::Hex => "[0-9A-Fa-f]",
            CharClass::Spec => r"[!-/:-@\[-`{-~]",
            CharClass::Any => ".",
            CharClass::Eps => "()",
            CharClass::Null => r"[^\x00-\x{10FFFF}]",
        }
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_inclusions() {
        use CharClass::*;
        assert!(Vow.chars().is_subset(Let.chars()));
        assert!(Cap.chars().is_subset(Let.chars()));
        assert!(Low.chars().is_subset(Let.chars()));
        assert!(Num.chars().is_subset(AlphaNum.chars()));
        assert!(Let.chars().is_subset(AlphaNum.chars()));
        assert_eq!(Let.chars().len(), 52);
        assert_eq!(Hex.chars().len(), 22);
        assert_eq!(Any.chars().len(), ALPHABET_SIZE);
        assert_eq!(Spec.chars().len(), 95 - 62 - 1);
        for c in CharClass::CHARACTER_CLASSES {
            assert!(!c.chars().is_empty(), "{c}");
        }
    }

    #[test]
    fn spec_standard_class_matches_set() {
        // the bracket ranges !-/ :-@ [-` {-~ cover exactly the punctuation
        let ranges = [('!', '/'), (':', '@'), ('[', '`'), ('{', '~')];
        let from_ranges = CharSet::from_pred(|c| ranges.iter().any(|&(a, b)| (a..=b).contains(&c)));
        assert_eq!(from_ranges, CharClass::Spec.chars());
    }

    #[test]
    fn charset_basics() {
        let s = CharSet::singleton('a').union(CharSet::singleton('~'));
        assert!(s.contains('a') && s.contains('~') && !s.contains('b'));
        assert_eq!(s.first(), Some('a'));
        assert_eq!(s.complement().len(), 93);
        assert!(CharSet::singleton('\n').is_empty());
    }
}
