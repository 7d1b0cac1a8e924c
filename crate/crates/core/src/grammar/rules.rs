use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use super::semfn::{SemFn, Value};

pub type CatId = usize;

/// Category of the complete parse.
pub const ROOT: &str = "$ROOT";
/// Built-in category of integer tokens; value is the integer.
pub const NUMBER: &str = "$NUMBER";
/// Built-in category of quoted-constant tokens; value is the quoted text.
pub const PHRASE: &str = "$PHRASE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbol {
    Word(String),
    Cat(CatId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// Value at this position of the matched sequence.
    Arg(usize),
    /// Literal integer.
    Val(u32),
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Constant(Value),
    Apply(SemFn, Vec<Selector>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// Feature name. Lexicon entries sharing a value share a name.
    pub name: String,
    pub lhs: Vec<Symbol>,
    pub target: CatId,
    pub action: Action,
}

impl Rule {
    pub fn is_lexical(&self) -> bool {
        self.lhs.iter().all(|s| matches!(s, Symbol::Word(_)))
    }

    pub fn is_unary(&self) -> bool {
        matches!(self.lhs.as_slice(), [Symbol::Cat(_)])
    }
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {msg}")]
    Syntax { file: &'static str, line: usize, msg: String },
    #[error("{file}:{line}: malformed selector {text:?}")]
    MalformedSelector { file: &'static str, line: usize, text: String },
    #[error("{file}:{line}: unknown semantic function {name:?}")]
    UnknownFunction { file: &'static str, line: usize, name: String },
    #[error("{file}:{line}: {func} cannot take {got} arguments")]
    Arity { file: &'static str, line: usize, func: SemFn, got: usize },
    #[error("{file}:{line}: selector arg:{index} is out of range for a {len}-item rule")]
    SelectorOutOfRange { file: &'static str, line: usize, index: usize, len: usize },
    #[error("{file}:{line}: category {name} is neither produced by a rule nor lexical")]
    UnknownCategory { file: &'static str, line: usize, name: String },
}

/// Lexical and compositional rules over interned categories.
#[derive(Debug, Clone, Default)]
pub struct Grammar {
    cats: Vec<String>,
    cat_index: HashMap<String, CatId>,
    rules: Vec<Rule>,
}

const RULES_FILE: &str = "rules";
const LEXICON_FILE: &str = "lexicon";

impl Grammar {
    /// Parses and validates a rules file and a lexicon file given as text.
    pub fn from_text(rules: &str, lexicon: &str) -> Result<Grammar, GrammarError> {
        let mut g = Grammar::default();
        for name in [ROOT, NUMBER, PHRASE] {
            g.cat(name);
        }
        // category references, checked once every producer is known
        let mut refs: Vec<(&'static str, usize, CatId)> = vec![];
        for (no, line) in numbered(lexicon) {
            g.lexicon_line(no, line)?;
        }
        for (no, line) in numbered(rules) {
            let rule = g.rule_line(no, line)?;
            for s in &rule.lhs {
                if let Symbol::Cat(c) = s {
                    refs.push((RULES_FILE, no, *c));
                }
            }
            g.rules.push(rule);
        }
        let mut produced = vec![false; g.cats.len()];
        for id in [NUMBER, PHRASE] {
            produced[g.cat_index[id]] = true;
        }
        for r in &g.rules {
            produced[r.target] = true;
        }
        if let Some(&(file, line, c)) = refs.iter().find(|(_, _, c)| !produced[*c]) {
            return Err(GrammarError::UnknownCategory { file, line, name: g.cats[c].clone() });
        }
        Ok(g)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn num_categories(&self) -> usize {
        self.cats.len()
    }

    pub fn category_name(&self, c: CatId) -> &str {
        &self.cats[c]
    }

    pub fn category(&self, name: &str) -> Option<CatId> {
        self.cat_index.get(name).copied()
    }

    pub fn root(&self) -> CatId {
        self.cat_index[ROOT]
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn cat(&mut self, name: &str) -> CatId {
        if let Some(&c) = self.cat_index.get(name) {
            return c;
        }
        self.cats.push(name.to_string());
        self.cat_index.insert(name.to_string(), self.cats.len() - 1);
        self.cats.len() - 1
    }

    fn lexicon_line(&mut self, no: usize, line: &str) -> Result<(), GrammarError> {
        let syntax = |msg: String| GrammarError::Syntax { file: LEXICON_FILE, line: no, msg };
        let fields: Vec<&str> = line.split('\t').collect();
        let [phrase, cat, value] = fields[..] else {
            return Err(syntax("expected `phrase<TAB>category<TAB>value`".into()));
        };
        let words: Vec<Symbol> = phrase.split_whitespace().map(|w| Symbol::Word(w.to_string())).collect();
        if words.is_empty() {
            return Err(syntax("empty phrase".into()));
        }
        let cat = cat.trim();
        if !is_category(cat) {
            return Err(syntax(format!("bad category {cat:?}")));
        }
        let value = Value::parse(value).ok_or_else(|| syntax(format!("bad value {value:?}")))?;
        let target = self.cat(cat);
        self.rules.push(Rule {
            name: lexical_name(&value),
            lhs: words,
            target,
            action: Action::Constant(value),
        });
        Ok(())
    }

    fn rule_line(&mut self, no: usize, line: &str) -> Result<Rule, GrammarError> {
        let syntax = |msg: &str| GrammarError::Syntax { file: RULES_FILE, line: no, msg: msg.to_string() };
        let (lhs_text, rhs) = line.split_once("->").ok_or_else(|| syntax("missing `->`"))?;
        let rhs = rhs.trim();
        let open = rhs.find('[').ok_or_else(|| syntax("missing `[action]`"))?;
        let body = rhs[open + 1..]
            .strip_suffix(']')
            .ok_or_else(|| syntax("action must end with `]`"))?;
        let target_name = rhs[..open].trim();
        if !is_category(target_name) {
            return Err(syntax("target must be a single `$CATEGORY`"));
        }
        let lhs_words: Vec<&str> = lhs_text.split_whitespace().collect();
        if lhs_words.is_empty() {
            return Err(syntax("empty left-hand side"));
        }
        let lhs: Vec<Symbol> = lhs_words
            .iter()
            .map(|w| {
                if is_category(w) {
                    Symbol::Cat(self.cat(w))
                } else {
                    Symbol::Word(w.to_string())
                }
            })
            .collect();
        let target = self.cat(target_name);
        let action = parse_action(body, lhs.len(), no)?;
        let name = match &action {
            Action::Constant(v) if lhs.iter().all(|s| matches!(s, Symbol::Word(_))) => lexical_name(v),
            _ => format!("{} -> {} [{}]", lhs_words.join(" "), target_name, normalize_action(body)),
        };
        Ok(Rule { name, lhs, target, action })
    }
}

/// Reads a rules file and a lexicon file from disk.
pub fn load_grammar(rules: impl AsRef<Path>, lexicon: impl AsRef<Path>) -> Result<Grammar, GrammarError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| GrammarError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    Grammar::from_text(&read(rules.as_ref())?, &read(lexicon.as_ref())?)
}

fn numbered(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim_end_matches('\r');
        let content = l.trim();
        (!content.is_empty() && !content.starts_with('#')).then_some((i + 1, l))
    })
}

fn is_category(s: &str) -> bool {
    s.len() > 1
        && s.starts_with('$')
        && s[1..].chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn lexical_name(v: &Value) -> String {
    let text = v.to_string();
    let bare = text
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .unwrap_or(&text);
    format!("lex:{bare}")
}

fn normalize_action(body: &str) -> String {
    body.replace(',', " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

fn parse_action(body: &str, lhs_len: usize, line: usize) -> Result<Action, GrammarError> {
    let file = RULES_FILE;
    let normalized = normalize_action(body);
    let mut parts = normalized.split_whitespace();
    let head = parts.next().ok_or(GrammarError::Syntax { file, line, msg: "empty action".into() })?;
    let bare = head.strip_prefix("sketch.").unwrap_or(head);
    if bare.ends_with("Fn") {
        let func = SemFn::from_name(head)
            .ok_or_else(|| GrammarError::UnknownFunction { file, line, name: head.to_string() })?;
        let mut sels = vec![];
        for p in parts {
            let bad = || GrammarError::MalformedSelector { file, line, text: p.to_string() };
            let sel = match p.split_once(':') {
                Some(("arg", "null")) => Selector::Null,
                Some(("arg", i)) => Selector::Arg(i.parse().map_err(|_| bad())?),
                Some(("val", n)) => Selector::Val(n.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            };
            if let Selector::Arg(index) = sel {
                if index >= lhs_len {
                    return Err(GrammarError::SelectorOutOfRange { file, line, index, len: lhs_len });
                }
            }
            sels.push(sel);
        }
        let got = sels.iter().filter(|s| !matches!(s, Selector::Null)).count();
        if !func.arities().contains(&got) {
            return Err(GrammarError::Arity { file, line, func, got });
        }
        return Ok(Action::Apply(func, sels));
    }
    Value::parse(body).map(Action::Constant).ok_or(GrammarError::Syntax {
        file,
        line,
        msg: format!("cannot read action {body:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_rules_and_lexicon() {
        let g = Grammar::from_text(
            "# comment\n$CC -> $PROGRAM [IdentityFn arg:0]\n$PROGRAM $MARKER_CONCAT $PROGRAM -> $PROGRAM [sketch.ConcatFn arg:0, arg:2]\n$PROGRAM -> $ROOT [UnarySketchFn arg:0]\n",
            "digit\t$CC\t<num>\ncapital letter\t$CC\t<cap>\nthen\t$MARKER_CONCAT\top.concat\n",
        )
        .unwrap();
        assert_eq!(g.rules().len(), 6);
        assert_eq!(g.rules()[0].name, "lex:num");
        assert_eq!(g.rules()[1].lhs.len(), 2);
        assert_eq!(g.rules()[2].name, "lex:op.concat");
        assert_eq!(
            g.rules()[4].name,
            "$PROGRAM $MARKER_CONCAT $PROGRAM -> $PROGRAM [sketch.ConcatFn arg:0 arg:2]"
        );
        assert_eq!(
            g.rules()[4].action,
            Action::Apply(SemFn::Concat, vec![Selector::Arg(0), Selector::Arg(2)])
        );
        assert!(g.rules()[3].is_unary());
    }

    #[test]
    fn empty_files() {
        let g = Grammar::from_text("", "").unwrap();
        assert!(g.is_empty());
        assert_eq!(g.category(ROOT), Some(g.root()));
    }

    #[test]
    fn rejects_bad_rules() {
        let err = |rules: &str| Grammar::from_text(rules, "digit\t$CC\t<num>").unwrap_err();
        assert!(matches!(
            err("$CC $CC -> $PROGRAM [ConcatFn arg:0 arg:5]"),
            GrammarError::SelectorOutOfRange { index: 5, len: 2, line: 1, .. }
        ));
        assert!(matches!(err("$CC -> $PROGRAM [FrobFn arg:0]"), GrammarError::UnknownFunction { .. }));
        assert!(matches!(
            err("$CC -> $PROGRAM [IdentityFn argh:0]"),
            GrammarError::MalformedSelector { .. }
        ));
        assert!(matches!(err("$CC -> $PROGRAM [ConcatFn arg:0]"), GrammarError::Arity { .. }));
        assert!(matches!(
            err("$CC\n"),
            GrammarError::Syntax { line: 1, .. }
        ));
        match err("$CC -> $PROGRAM [IdentityFn arg:0]\n$NOPE -> $ROOT [IdentityFn arg:0]") {
            GrammarError::UnknownCategory { name, line, .. } => {
                assert_eq!((name.as_str(), line), ("$NOPE", 2));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_bad_lexicon() {
        assert!(matches!(
            Grammar::from_text("", "digit <num>"),
            Err(GrammarError::Syntax { file: "lexicon", .. })
        ));
        assert!(matches!(
            Grammar::from_text("", "digit\tCC\t<num>"),
            Err(GrammarError::Syntax { .. })
        ));
        assert!(matches!(
            Grammar::from_text("", "digit\t$CC\tConcat(<num>"),
            Err(GrammarError::Syntax { .. })
        ));
    }
}
