use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Word(String),
    Int(u32),
    /// Quoted string constant, content kept verbatim.
    Const(String),
}

impl Token {
    pub fn word(w: &str) -> Token {
        Token::Word(w.to_string())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => f.write_str(w),
            Token::Int(n) => write!(f, "{n}"),
            Token::Const(s) => write!(f, "\"{s}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("unbalanced quote starting at byte {0}")]
    UnbalancedQuote(usize),
}

/// Inflected forms folded onto the lemmas the lexicon uses.
const LEMMAS: &[(&str, &str)] = &[
    ("letters", "letter"),
    ("digits", "digit"),
    ("numbers", "number"),
    ("numerals", "numeral"),
    ("characters", "character"),
    ("chars", "char"),
    ("words", "word"),
    ("vowels", "vowel"),
    ("alphabets", "alphabet"),
    ("strings", "string"),
    ("commas", "comma"),
    ("colons", "colon"),
    ("semicolons", "semicolon"),
    ("spaces", "space"),
    ("dashes", "dash"),
    ("hyphens", "hyphen"),
    ("underscores", "underscore"),
    ("periods", "period"),
    ("dots", "dot"),
    ("decimals", "decimal"),
    ("times", "time"),
    ("starts", "start"),
    ("starting", "start"),
    ("started", "start"),
    ("begins", "begin"),
    ("beginning", "begin"),
    ("ends", "end"),
    ("ending", "end"),
    ("ended", "end"),
    ("finishes", "finish"),
    ("finishing", "finish"),
    ("finished", "finish"),
    ("terminates", "terminate"),
    ("terminating", "terminate"),
    ("terminated", "terminate"),
    ("follows", "follow"),
    ("followed", "follow"),
    ("following", "follow"),
    ("precedes", "precede"),
    ("preceded", "precede"),
    ("preceding", "precede"),
    ("contains", "contain"),
    ("containing", "contain"),
    ("contained", "contain"),
    ("includes", "include"),
    ("including", "include"),
    ("included", "include"),
    ("has", "have"),
    ("having", "have"),
    ("allows", "allow"),
    ("allowed", "allow"),
    ("allowing", "allow"),
    ("separates", "separate"),
    ("separating", "separate"),
    ("delimited", "delimit"),
    ("delimits", "delimit"),
    ("splits", "split"),
    ("splitting", "split"),
    ("divided", "divide"),
    ("divides", "divide"),
    ("repeated", "repeat"),
    ("repeats", "repeat"),
];

fn lemma(word: &str) -> String {
    LEMMAS
        .iter()
        .find(|(form, _)| *form == word)
        .map_or_else(|| word.to_string(), |(_, l)| l.to_string())
}

fn push_word(tokens: &mut Vec<Token>, word: &mut String) {
    if word.is_empty() {
        return;
    }
    let w = std::mem::take(word);
    if w.bytes().all(|b| b.is_ascii_digit()) {
        if let Ok(n) = w.parse() {
            tokens.push(Token::Int(n));
            return;
        }
    }
    tokens.push(Token::Word(lemma(&w)));
}

/// Splits a description into lowercased, lemmatized tokens. Punctuation
/// marks become tokens of their own, hyphens separate words, digit runs become
/// [`Token::Int`] and text quoted with `"..."` or ``` ``...'' ``` becomes a
/// single [`Token::Const`].
pub fn tokenize(description: &str) -> Result<Vec<Token>, TokenizeError> {
    let mut tokens = vec![];
    let mut word = String::new();
    let mut rest = description;
    let mut offset = 0;
    while let Some(c) = rest.chars().next() {
        let quote = if rest.starts_with("``") {
            Some(("``", "''"))
        } else if c == '"' {
            Some(("\"", "\""))
        } else {
            None
        };
        if let Some((open, close)) = quote {
            push_word(&mut tokens, &mut word);
            let body = &rest[open.len()..];
            let end = body.find(close).ok_or(TokenizeError::UnbalancedQuote(offset))?;
            tokens.push(Token::Const(body[..end].to_string()));
            let consumed = open.len() + end + close.len();
            rest = &rest[consumed..];
            offset += consumed;
            continue;
        }
        if c.is_whitespace() || c == '-' {
            push_word(&mut tokens, &mut word);
        } else if c.is_alphanumeric() || c == '\'' {
            word.extend(c.to_lowercase());
        } else {
            push_word(&mut tokens, &mut word);
            tokens.push(Token::Word(c.to_string()));
        }
        rest = &rest[c.len_utf8()..];
        offset += c.len_utf8();
    }
    push_word(&mut tokens, &mut word);
    Ok(tokens)
}
