use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::examplegen::Examples;
use crate::regex::{parse_regex, parse_sketch, Regex, Sketch};
use crate::synth::consistent;

/// A description with examples, and optionally its gold regex and sketch.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub id: String,
    pub description: String,
    pub gold_regex: Option<Regex>,
    pub examples: Examples,
    pub gold_sketch: Option<Sketch>,
}

/// On-disk form: one JSON object per line, regexes in textual syntax.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold_regex: Option<String>,
    #[serde(default)]
    pos: Vec<String>,
    #[serde(default)]
    neg: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold_sketch: Option<String>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Json { line: usize, msg: String },
    #[error("line {line}: bad {field}: {msg}")]
    Field { line: usize, field: &'static str, msg: String },
}

impl Benchmark {
    pub fn new(id: impl Into<String>, description: impl Into<String>, examples: Examples) -> Benchmark {
        Benchmark {
            id: id.into(),
            description: description.into(),
            gold_regex: None,
            examples,
            gold_sketch: None,
        }
    }

    /// Describes how the gold regex disagrees with the examples, if it does.
    pub fn validate(&self) -> Option<String> {
        if let Some(w) = self.examples.contradiction() {
            return Some(format!("{}: {w:?} is both positive and negative", self.id));
        }
        let gold = self.gold_regex.as_ref()?;
        (!consistent(gold, &self.examples)).then(|| format!("{}: gold regex {gold} disagrees with its examples", self.id))
    }

    fn to_record(&self) -> Record {
        Record {
            id: self.id.clone(),
            description: self.description.clone(),
            gold_regex: self.gold_regex.as_ref().map(ToString::to_string),
            pos: self.examples.positives.clone(),
            neg: self.examples.negatives.clone(),
            gold_sketch: self.gold_sketch.as_ref().map(ToString::to_string),
        }
    }
}

/// Parses a JSON Lines dataset. Blank lines are ignored.
pub fn parse_jsonl(text: &str) -> Result<Vec<Benchmark>, DatasetError> {
    let mut out = vec![];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let r: Record = serde_json::from_str(line).map_err(|e| DatasetError::Json {
            line: line_no,
            msg: e.to_string(),
        })?;
        let field = |field, msg: String| DatasetError::Field { line: line_no, field, msg };
        let gold_regex = r
            .gold_regex
            .as_deref()
            .map(parse_regex)
            .transpose()
            .map_err(|e| field("gold_regex", e.to_string()))?;
        let gold_sketch = r
            .gold_sketch
            .as_deref()
            .map(parse_sketch)
            .transpose()
            .map_err(|e| field("gold_sketch", e.to_string()))?;
        out.push(Benchmark {
            id: r.id,
            description: r.description,
            gold_regex,
            examples: Examples::new(r.pos, r.neg),
            gold_sketch,
        });
    }
    Ok(out)
}

pub fn to_jsonl(items: &[Benchmark]) -> String {
    items
        .iter()
        .map(|b| serde_json::to_string(&b.to_record()).expect("records serialize") + "\n")
        .collect()
}

/// Loads a dataset and logs a warning for each item whose gold regex
/// disagrees with its examples.
pub fn load_benchmarks(path: impl AsRef<Path>) -> Result<Vec<Benchmark>, DatasetError> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p).map_err(|source| DatasetError::Io {
        path: p.display().to_string(),
        source,
    })?;
    let items = parse_jsonl(&text)?;
    for msg in items.iter().filter_map(Benchmark::validate) {
        log::warn!("{msg}");
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let text = r#"{"id":"a","description":"digit then letter","gold_regex":"Concat(<num>,<let>)","pos":["1a"],"neg":["a1"],"gold_sketch":"?{<num>,<let>}"}

{"id":"b","description":"anything"}
"#;
        let items = parse_jsonl(text).unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].gold_regex.as_ref().unwrap().to_string(), "Concat(<num>,<let>)");
        assert_eq!(items[1].examples, Examples::default());
        assert_eq!(parse_jsonl(&to_jsonl(&items)).unwrap(), items);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_jsonl("{}\n"), Err(DatasetError::Json { line: 1, .. })));
        let bad = "\n{\"id\":\"x\",\"description\":\"d\",\"gold_regex\":\"Concat(\"}";
        assert!(matches!(
            parse_jsonl(bad),
            Err(DatasetError::Field { line: 2, field: "gold_regex", .. })
        ));
    }

    #[test]
    fn validation_reports_disagreement() {
        let mut b = Benchmark::new("x", "digit", Examples::new(["1"], ["a"]));
        assert!(b.validate().is_none());
        b.gold_regex = Some(parse_regex("<let>").unwrap());
        assert!(b.validate().unwrap().contains("disagrees"));
        b.examples = Examples::new(["1"], ["1"]);
        assert!(b.validate().unwrap().contains("both"));
    }
}
