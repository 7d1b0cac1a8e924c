//! Every shipped rule fires in some parse of a short description.

use std::collections::BTreeSet;

use sketchregex::grammar::{
    parse, rule_feature, shipped_grammar, tokenize, ParseConfig, Producer, Symbol, WeightVector, SKIP_FEATURE,
};

/// Description in which a lexicon phrase of the given category can take part
/// in a complete parse; `{}` stands for the phrase.
fn lexical_template(category: &str) -> &'static str {
    match category {
        "$CC" | "$CONST" | "$MARKER_DECIMALNUM" => "{}",
        "$INT" | "$MARKER_NOT" | "$MARKER_OPTIONAL" | "$MARKER_NOTCONTAIN" | "$MARKER_CONTAIN"
        | "$MARKER_STAR" | "$MARKER_STARTWITH" | "$MARKER_ENDWITH" | "$MARKER_ONLY" => "{} digit",
        "$MARKER_NON" => "{} comma",
        "$MARKER_OR" => "1 {} 2 digit",
        "$MARKER_AND" | "$MARKER_CONCAT" | "$MARKER_FOLLOW" | "$MARKER_DECIMAL" => "digit {} letter",
        "$MARKER_ORMORE" => "2 {} digit",
        "$MARKER_ATLEAST" | "$MARKER_ATMAX" => "{} 3 digit",
        "$MARKER_LENGTH" => "digit {} 3",
        "$MARKER_CONSTSETUNION" => "comma {} colon",
        "$MARKER_SEP" => "digit comma {}",
        "$MARKER_BETWEEN" => "comma {} digit",
        "$MARKER_SPLITBY" => "digit {} comma",
        "$MARKER_ATEND" => "digit {}",
        other => panic!("no template for {other}"),
    }
}

const COMPOSITIONAL: &[&str] = &[
    "digit",
    "3 digit",
    "\"ab\"",
    "digit letter",
    "not contain digit",
    "not digit",
    "non comma",
    "optional digit",
    "digit optional",
    "optional 3 digit",
    "start with digit",
    "end with digit",
    "digit at end",
    "contain digit",
    "digit before letter",
    "digit after letter",
    "digit or letter",
    "digit and letter",
    "zero or more digit",
    "digit length 3",
    "length 3 digit",
    "1 or 2 digit",
    "only digit",
    "digit only",
    "2 or more digit",
    "digit 2 or more",
    "at least 2 digit",
    "at most 3 digit",
    "between 2 and 4 digit",
    "comma or colon",
    "comma colon",
    "comma colon semicolon",
    "comma, colon or semicolon",
    "digit, comma",
    "digit, comma colon",
    "digit comma delimit",
    "digit letter delimit",
    "comma between digit",
    "digit split by comma",
    "digit decimal digit",
    "decimal digit digit",
    "digit digit decimal",
    "double number",
];

#[test]
fn every_rule_fires() {
    let g = shipped_grammar();
    let cfg = ParseConfig { beam: 100, ..ParseConfig::default() };
    let mut descriptions: Vec<String> = COMPOSITIONAL.iter().map(|s| s.to_string()).collect();
    for rule in g.rules().iter().filter(|r| r.is_lexical()) {
        let phrase: Vec<&str> = rule
            .lhs
            .iter()
            .map(|s| match s {
                Symbol::Word(w) => w.as_str(),
                Symbol::Cat(_) => unreachable!(),
            })
            .collect();
        let template = lexical_template(g.category_name(rule.target));
        descriptions.push(template.replace("{}", &phrase.join(" ")));
    }
    // equal sketches are merged in the chart, so prefer full coverage and
    // then fewer rule applications
    let mut w = WeightVector::new();
    w.set(SKIP_FEATURE, -1.0);
    for r in g.rules() {
        w.set(&rule_feature(&r.name), -0.01);
    }
    let mut fired = BTreeSet::new();
    for d in &descriptions {
        let toks = tokenize(d).unwrap();
        for p in parse(&g, &toks, &w, &cfg) {
            for node in p.derivation.nodes() {
                if let Producer::Rule(r) = node.producer {
                    fired.insert(r);
                }
            }
        }
    }
    let missing: Vec<&str> = (0..g.rules().len())
        .filter(|r| !fired.contains(r))
        .map(|r| g.rules()[r].name.as_str())
        .collect();
    assert!(missing.is_empty(), "rules never fired: {missing:#?}");
}

#[test]
fn shipped_grammar_size() {
    let g = shipped_grammar();
    let lexical = g.rules().iter().filter(|r| r.is_lexical()).count();
    let compositional = g.rules().len() - lexical;
    assert!((60..=100).contains(&lexical), "{lexical} lexical rules");
    assert!((55..=70).contains(&compositional), "{compositional} compositional rules");
}
