use std::fmt;

use thiserror::Error;

use crate::regex::{in_alphabet, parse_sketch, BinaryOp, CharClass, Count, Regex, Sketch, UnaryOp};

/// Intermediate value carried by a derivation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Sketch(Sketch),
    Int(u32),
    /// Union of constants, read as an `Or` chain where a regex is needed.
    Set(Vec<Sketch>),
    /// Operator marker such as `op.startwith`.
    Marker(String),
    /// Raw text of a quoted constant.
    Text(String),
    Null,
}

impl Value {
    /// Reads a constant action: `op.*` markers, integers, or DSL sketches.
    pub fn parse(text: &str) -> Option<Value> {
        let text = text.trim();
        if text.starts_with("op.") {
            return Some(Value::Marker(text.to_string()));
        }
        if text == "null" {
            return Some(Value::Null);
        }
        if let Ok(n) = text.parse::<u32>() {
            return Some(Value::Int(n));
        }
        parse_sketch(text).ok().map(Value::Sketch)
    }

    pub fn as_sketch(&self) -> Option<Sketch> {
        match self {
            Value::Sketch(s) => Some(s.clone()),
            Value::Set(members) => members
                .iter()
                .rev()
                .cloned()
                .reduce(|acc, m| Sketch::binary(BinaryOp::Or, m, acc)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Sketch(s) => write!(f, "{s}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Set(ms) => {
                f.write_str("{")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("}")
            }
            Value::Marker(m) => f.write_str(m),
            Value::Text(t) => write!(f, "{t:?}"),
            Value::Null => f.write_str("null"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("{func} expects {expected} arguments, got {got}")]
    Arity { func: SemFn, expected: String, got: usize },
    #[error("{func}: argument {index} must be {expected}, got {got}")]
    TypeMismatch { func: SemFn, index: usize, expected: &'static str, got: String },
    #[error("{func}: invalid repetition count")]
    InvalidCount { func: SemFn },
    #[error("constant {0:?} has characters outside the alphabet")]
    OutOfAlphabet(String),
}

macro_rules! semfns {
    ($($v:ident = $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum SemFn { $($v,)* }

        impl SemFn {
            pub const ALL: &'static [SemFn] = &[$(SemFn::$v,)*];

            pub fn name(self) -> &'static str {
                match self { $(SemFn::$v => $name,)* }
            }
        }
    };
}

semfns! {
    Identity = "IdentityFn",
    Select = "SelectFn",
    Constant = "ConstantFn",
    Number = "NumberFn",
    Const = "ConstFn",
    ConstUnion = "ConstUnionFn",
    Not = "NotFn",
    Notcc = "NotccFn",
    NotContain = "NotContainFn",
    Contain = "ContainFn",
    Optional = "OptionalFn",
    KleeneStar = "KleeneStarFn",
    Startwith = "StartwithFn",
    Endwith = "EndwithFn",
    Concat = "ConcatFn",
    Or = "OrFn",
    And = "AndFn",
    Repeat = "RepeatFn",
    RepeatAOrB = "RepeatAOrBFn",
    Repeatatleast = "RepeatatleastFn",
    Repeatrange = "RepeatrangeFn",
    UnarySketch = "UnarySketchFn",
    SketchJoin = "SketchJoinFn",
    Sep = "SepFn",
    Decimal = "DecimalFn",
}

impl fmt::Display for SemFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl SemFn {
    /// Looks a function up by name; a `sketch.` prefix is ignored.
    pub fn from_name(name: &str) -> Option<SemFn> {
        let bare = name.strip_prefix("sketch.").unwrap_or(name);
        SemFn::ALL.iter().copied().find(|f| f.name() == bare)
    }

    /// Accepted argument counts.
    pub fn arities(self) -> &'static [usize] {
        use SemFn::*;
        match self {
            Constant => &[0, 1],
            Decimal => &[0, 2],
            Identity | Select | Number | Const | Not | Notcc | NotContain | Contain | Optional
            | KleeneStar | Startwith | Endwith | UnarySketch => &[1],
            ConstUnion | Concat | Or | And | Repeat | Repeatatleast | SketchJoin | Sep => &[2],
            RepeatAOrB | Repeatrange => &[3],
        }
    }
}

fn sketch_arg(func: SemFn, args: &[Value], i: usize) -> Result<Sketch, SemError> {
    args[i].as_sketch().ok_or_else(|| SemError::TypeMismatch {
        func,
        index: i,
        expected: "a regex or sketch",
        got: args[i].to_string(),
    })
}

fn int_arg(func: SemFn, args: &[Value], i: usize) -> Result<u32, SemError> {
    match &args[i] {
        Value::Int(n) => Ok(*n),
        other => Err(SemError::TypeMismatch {
            func,
            index: i,
            expected: "an integer",
            got: other.to_string(),
        }),
    }
}

fn repeat(func: SemFn, s: Sketch, count: Count) -> Result<Sketch, SemError> {
    if count.is_valid() {
        Ok(Sketch::repeat(s, count))
    } else {
        Err(SemError::InvalidCount { func })
    }
}

fn members(v: &Value) -> Option<Vec<Sketch>> {
    match v {
        Value::Set(ms) => Some(ms.clone()),
        Value::Sketch(s) => Some(vec![s.clone()]),
        _ => None,
    }
}

/// A hole whose components are `comps` without duplicates, in order.
fn hole_of(comps: impl IntoIterator<Item = Sketch>) -> Sketch {
    let mut out: Vec<Sketch> = vec![];
    for c in comps {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Sketch::hole(out)
}

/// Applies a semantic function to already-selected arguments.
pub fn apply_semfn(func: SemFn, args: &[Value]) -> Result<Value, SemError> {
    use SemFn::*;
    if !func.arities().contains(&args.len()) {
        let expected = func
            .arities()
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(" or ");
        return Err(SemError::Arity { func, expected, got: args.len() });
    }
    let s = |i| sketch_arg(func, args, i);
    let n = |i| int_arg(func, args, i);
    let sk = |x: Sketch| Ok(Value::Sketch(x));
    match func {
        Identity | Select => Ok(args[0].clone()),
        Constant => Ok(Value::Null),
        Number => match &args[0] {
            Value::Int(k) => Ok(Value::Int(*k)),
            Value::Text(t) => t.trim().parse().map(Value::Int).map_err(|_| SemError::TypeMismatch {
                func,
                index: 0,
                expected: "an integer",
                got: t.clone(),
            }),
            other => Err(SemError::TypeMismatch {
                func,
                index: 0,
                expected: "an integer",
                got: other.to_string(),
            }),
        },
        Const => match &args[0] {
            Value::Text(t) if t.chars().all(in_alphabet) => sk(Regex::literal(t).to_sketch()),
            Value::Text(t) => Err(SemError::OutOfAlphabet(t.clone())),
            other => Err(SemError::TypeMismatch {
                func,
                index: 0,
                expected: "quoted text",
                got: other.to_string(),
            }),
        },
        ConstUnion => {
            let mut out = vec![];
            for (i, a) in args.iter().enumerate() {
                let ms = members(a).ok_or_else(|| SemError::TypeMismatch {
                    func,
                    index: i,
                    expected: "a constant or constant set",
                    got: a.to_string(),
                })?;
                for m in ms {
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
            }
            Ok(Value::Set(out))
        }
        Not => sk(Sketch::unary(UnaryOp::Not, s(0)?)),
        Notcc => sk(Sketch::binary(
            BinaryOp::And,
            Sketch::Class(CharClass::Any),
            Sketch::unary(UnaryOp::Not, s(0)?),
        )),
        NotContain => sk(Sketch::unary(UnaryOp::Not, Sketch::unary(UnaryOp::Contains, s(0)?))),
        Contain => sk(Sketch::unary(UnaryOp::Contains, s(0)?)),
        Optional => sk(Sketch::unary(UnaryOp::Optional, s(0)?)),
        KleeneStar => sk(Sketch::unary(UnaryOp::KleeneStar, s(0)?)),
        Startwith => sk(Sketch::unary(UnaryOp::StartsWith, s(0)?)),
        Endwith => sk(Sketch::unary(UnaryOp::EndsWith, s(0)?)),
        Concat => sk(Sketch::binary(BinaryOp::Concat, s(0)?, s(1)?)),
        Or => sk(Sketch::binary(BinaryOp::Or, s(0)?, s(1)?)),
        And => sk(Sketch::binary(BinaryOp::And, s(0)?, s(1)?)),
        Repeat => sk(repeat(func, s(0)?, Count::Exactly(n(1)?))?),
        Repeatatleast => sk(repeat(func, s(0)?, Count::AtLeast(n(1)?))?),
        Repeatrange => sk(repeat(func, s(0)?, Count::Range(n(1)?, n(2)?))?),
        RepeatAOrB => {
            let (x, a, b) = (s(0)?, n(1)?, n(2)?);
            let ra = repeat(func, x.clone(), Count::Exactly(a))?;
            if a == b {
                return sk(ra);
            }
            sk(Sketch::binary(BinaryOp::Or, ra, repeat(func, x, Count::Exactly(b))?))
        }
        UnarySketch => match s(0)? {
            h @ Sketch::Hole(_) => sk(h),
            x => sk(Sketch::hole(vec![x])),
        },
        SketchJoin => {
            let x = s(0)?;
            match s(1)? {
                Sketch::Hole(comps) => sk(hole_of(std::iter::once(x).chain(comps))),
                h => sk(hole_of([x, h])),
            }
        }
        Sep => {
            let (x, sep) = (s(0)?, s(1)?);
            let tail = Sketch::unary(
                UnaryOp::KleeneStar,
                Sketch::binary(BinaryOp::Concat, sep.clone(), x.clone()),
            );
            let full = Sketch::binary(BinaryOp::Concat, x.clone(), tail);
            sk(hole_of([x, sep, full]))
        }
        Decimal => {
            let (a, b) = if args.is_empty() {
                (Sketch::Class(CharClass::Num), Sketch::Class(CharClass::Num))
            } else {
                (s(0)?, s(1)?)
            };
            let frac = Sketch::unary(
                UnaryOp::Optional,
                Sketch::binary(BinaryOp::Concat, Sketch::Lit('.'), b.clone()),
            );
            let full = Sketch::binary(BinaryOp::Concat, a.clone(), frac);
            sk(hole_of([a, b, full]))
        }
    }
}
