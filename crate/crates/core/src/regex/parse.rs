//! Recursive-descent parser for the textual DSL.
//!
//! ```text
//! node  := op '(' args ')' | '<' name '>' | '<' char '>' | '"' chars '"' | '?' '{' [node (',' node)*] '}'
//! ```
//!
//! Constructor names are matched case-insensitively; `RepAtLeast` and
//! `RepRange` are accepted as aliases.

use thiserror::Error;

use super::charclass::in_alphabet;
use super::{BinaryOp, CharClass, Count, Regex, Sketch, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("repetition count must be positive (position {pos})")]
    NonPositiveCount { pos: usize },
    #[error("repetition range {lo},{hi} has lower bound above upper bound (position {pos})")]
    InvertedRange { pos: usize, lo: u32, hi: u32 },
    #[error("holes are not allowed in a concrete regex (position {pos})")]
    UnexpectedHole { pos: usize },
    #[error("character {ch:?} is outside the alphabet (position {pos})")]
    OutOfAlphabet { pos: usize, ch: char },
}

pub fn parse_regex(text: &str) -> Result<Regex, ParseError> {
    let sketch = Parser::new(text, false).parse_all()?;
    Ok(sketch.to_regex().expect("holes rejected during parsing"))
}

pub fn parse_sketch(text: &str) -> Result<Sketch, ParseError> {
    Parser::new(text, true).parse_all()
}

enum Ctor {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Repeat,
    AtLeast,
    Range,
}

fn constructor(name: &str) -> Option<Ctor> {
    let lower = name.to_ascii_lowercase();
    Some(match lower.as_str() {
        "startswith" => Ctor::Unary(UnaryOp::StartsWith),
        "endswith" => Ctor::Unary(UnaryOp::EndsWith),
        "contains" => Ctor::Unary(UnaryOp::Contains),
        "not" => Ctor::Unary(UnaryOp::Not),
        "optional" => Ctor::Unary(UnaryOp::Optional),
        "kleenestar" => Ctor::Unary(UnaryOp::KleeneStar),
        "concat" => Ctor::Binary(BinaryOp::Concat),
        "and" => Ctor::Binary(BinaryOp::And),
        "or" => Ctor::Binary(BinaryOp::Or),
        "repeat" => Ctor::Repeat,
        "repeatatleast" | "repatleast" => Ctor::AtLeast,
        "repeatrange" | "reprange" => Ctor::Range,
        _ => return None,
    })
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    allow_holes: bool,
}

impl Parser {
    fn new(text: &str, allow_holes: bool) -> Parser {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            allow_holes,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected '{c}', found '{found}'")),
                None => self.err(format!("expected '{c}', found end of input")),
            }
        }
    }

    fn parse_all(&mut self) -> Result<Sketch, ParseError> {
        let node = self.node()?;
        self.skip_ws();
        if self.pos != self.chars.len() {
            return self.err("trailing input");
        }
        Ok(node)
    }

    fn node(&mut self) -> Result<Sketch, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('?') => self.hole(),
            Some('<') => self.angle(),
            Some('"') => self.string(),
            Some(c) if c.is_ascii_alphabetic() => self.call(),
            Some(c) => self.err(format!("unexpected character '{c}'")),
        }
    }

    fn hole(&mut self) -> Result<Sketch, ParseError> {
        if !self.allow_holes {
            return Err(ParseError::UnexpectedHole { pos: self.pos });
        }
        self.pos += 1;
        self.expect('{')?;
        let mut components = vec![];
        self.skip_ws();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(Sketch::Hole(components));
        }
        loop {
            components.push(self.node()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(Sketch::Hole(components));
                }
                _ => return self.err("expected ',' or '}' in hole"),
            }
        }
    }

    fn angle(&mut self) -> Result<Sketch, ParseError> {
        let start = self.pos;
        self.pos += 1;
        // `<c>` is a single-character literal, including `<>>` and `<<>`
        if let (Some(c), Some('>')) = (self.chars.get(self.pos), self.chars.get(self.pos + 1)) {
            let c = *c;
            self.pos += 2;
            if !in_alphabet(c) {
                return Err(ParseError::OutOfAlphabet { pos: start + 1, ch: c });
            }
            return Ok(Sketch::Lit(c));
        }
        let name_start = self.pos;
        while self.peek().is_some_and(|c| c != '>') {
            self.pos += 1;
        }
        if self.peek().is_none() {
            self.pos = start;
            return self.err("unterminated '<'");
        }
        let name: String = self.chars[name_start..self.pos].iter().collect();
        self.pos += 1;
        if let Some(class) = CharClass::from_name(&name) {
            return Ok(Sketch::Class(class));
        }
        match name.as_str() {
            "space" => Ok(Sketch::Lit(' ')),
            _ => {
                self.pos = start;
                self.err(format!("unknown character class <{name}>"))
            }
        }
    }

    fn string(&mut self) -> Result<Sketch, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let mut text = String::new();
        loop {
            match self.peek() {
                None => {
                    self.pos = start;
                    return self.err("unterminated string literal");
                }
                Some('"') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c) => text.push(c),
                        None => return self.err("dangling escape"),
                    }
                    self.pos += 1;
                }
                Some(c) => {
                    if !in_alphabet(c) {
                        return Err(ParseError::OutOfAlphabet { pos: self.pos, ch: c });
                    }
                    text.push(c);
                    self.pos += 1;
                }
            }
        }
        Ok(Regex::literal(&text).to_sketch())
    }

    fn integer(&mut self) -> Result<(usize, u32), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        match digits.parse() {
            Ok(v) => Ok((start, v)),
            Err(_) => {
                self.pos = start;
                self.err("integer out of range")
            }
        }
    }

    fn positive(&mut self) -> Result<u32, ParseError> {
        let (pos, v) = self.integer()?;
        if v == 0 {
            return Err(ParseError::NonPositiveCount { pos });
        }
        Ok(v)
    }

    fn call(&mut self) -> Result<Sketch, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let Some(ctor) = constructor(&name) else {
            self.pos = start;
            return self.err(format!("unknown constructor '{name}'"));
        };
        self.expect('(')?;
        let node = match ctor {
            Ctor::Unary(op) => Sketch::unary(op, self.node()?),
            Ctor::Binary(op) => {
                let a = self.node()?;
                self.expect(',')?;
                Sketch::binary(op, a, self.node()?)
            }
            Ctor::Repeat | Ctor::AtLeast => {
                let body = self.node()?;
                self.expect(',')?;
                let k = self.positive()?;
                let count = match ctor {
                    Ctor::Repeat => Count::Exactly(k),
                    _ => Count::AtLeast(k),
                };
                Sketch::repeat(body, count)
            }
            Ctor::Range => {
                let body = self.node()?;
                self.expect(',')?;
                let lo = self.positive()?;
                self.expect(',')?;
                let pos = self.pos;
                let hi = self.positive()?;
                if lo > hi {
                    return Err(ParseError::InvertedRange { pos, lo, hi });
                }
                Sketch::repeat(body, Count::Range(lo, hi))
            }
        };
        self.expect(')')?;
        Ok(node)
    }
}
