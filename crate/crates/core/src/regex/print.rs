use std::fmt;

use super::{BinaryOp, Count, Regex, Sketch, UnaryOp};

/// Literal text of a right-nested concatenation of two or more single
/// characters, which prints as a string literal.
fn literal_chain(s: &Sketch) -> Option<String> {
    let mut out = String::new();
    let mut cur = s;
    loop {
        match cur {
            Sketch::Binary(BinaryOp::Concat, a, b) => match **a {
                Sketch::Lit(c) => {
                    out.push(c);
                    cur = b;
                }
                _ => return None,
            },
            Sketch::Lit(c) if !out.is_empty() => {
                out.push(*c);
                return Some(out);
            }
            _ => return None,
        }
    }
}

pub(super) fn write_sketch(f: &mut fmt::Formatter<'_>, s: &Sketch) -> fmt::Result {
    if let Some(text) = literal_chain(s) {
        f.write_str("\"")?;
        for c in text.chars() {
            if c == '"' || c == '\\' {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        return f.write_str("\"");
    }
    match s {
        Sketch::Hole(cs) => {
            f.write_str("?{")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_sketch(f, c)?;
            }
            f.write_str("}")
        }
        Sketch::Class(c) => write!(f, "{c}"),
        Sketch::Lit(c) => write!(f, "<{c}>"),
        Sketch::Unary(op, x) => {
            write!(f, "{}(", op.name())?;
            write_sketch(f, x)?;
            f.write_str(")")
        }
        Sketch::Binary(op, a, b) => {
            write!(f, "{}(", op.name())?;
            write_sketch(f, a)?;
            f.write_str(",")?;
            write_sketch(f, b)?;
            f.write_str(")")
        }
        Sketch::Repeat(x, k) => {
            write!(f, "{}(", k.name())?;
            write_sketch(f, x)?;
            for p in k.params() {
                write!(f, ",{p}")?;
            }
            f.write_str(")")
        }
    }
}

fn escape(c: char, out: &mut String) {
    if "\\.+*?()|[]{}^$&~-#".contains(c) {
        out.push('\\');
    }
    out.push(c);
}

/// Translates a concrete regex to conventional regular-expression notation.
///
/// Every operand is parenthesized; runs of literal characters print as plain
/// text. `Not` prints as `~(...)` and `And` as `(...)&(...)`, which most
/// engines do not support.
pub fn to_standard_regex(r: &Regex) -> String {
    let mut out = String::new();
    standard(r, &mut out);
    out
}

fn standard(r: &Regex, out: &mut String) {
    let sketch = r.to_sketch();
    if let Some(text) = literal_chain(&sketch) {
        text.chars().for_each(|c| escape(c, out));
        return;
    }
    let group = |x: &Regex, out: &mut String| {
        out.push('(');
        standard(x, out);
        out.push(')');
    };
    match r {
        Regex::Class(c) => out.push_str(c.standard()),
        Regex::Lit(c) => escape(*c, out),
        Regex::Unary(op, x) => match op {
            UnaryOp::StartsWith => {
                group(x, out);
                out.push_str(".*");
            }
            UnaryOp::EndsWith => {
                out.push_str(".*");
                group(x, out);
            }
            UnaryOp::Contains => {
                out.push_str(".*");
                group(x, out);
                out.push_str(".*");
            }
            UnaryOp::Not => {
                out.push('~');
                group(x, out);
            }
            UnaryOp::Optional => {
                group(x, out);
                out.push('?');
            }
            UnaryOp::KleeneStar => {
                group(x, out);
                out.push('*');
            }
        },
        Regex::Binary(op, a, b) => {
            group(a, out);
            match op {
                BinaryOp::Concat => {}
                BinaryOp::And => out.push('&'),
                BinaryOp::Or => out.push('|'),
            }
            group(b, out);
        }
        Regex::Repeat(x, k) => {
            group(x, out);
            match k {
                Count::Exactly(n) => out.push_str(&format!("{{{n}}}")),
                Count::AtLeast(n) => out.push_str(&format!("{{{n},}}")),
                Count::Range(lo, hi) => out.push_str(&format!("{{{lo},{hi}}}")),
            }
        }
    }
}
