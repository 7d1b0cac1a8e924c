//! End-to-end runs: k-best sketches from the parser, one synthesizer per
//! sketch, and the highest-ranked sketch whose completion fits the examples.
//!
//! Runs are deterministic when `max_expansions` bounds the synthesizer and
//! the wall-clock timeout is never reached first. Timing is left out of
//! reports unless asked for, so reports can be compared byte for byte.

mod dataset;

use std::fmt::Display;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::automata::equivalent;
use crate::examplegen::Examples;
use crate::grammar::{parse, tokenize, Grammar, ParseConfig, WeightVector, SKIP_FEATURE};
use crate::learning::max_coverage_rank;
use crate::regex::{Regex, Sketch};
use crate::synth::{consistent, synthesize, Outcome, SynthConfig};

pub use dataset::{load_benchmarks, parse_jsonl, to_jsonl, Benchmark, DatasetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Turk,
    StackOverflow,
}

impl FromStr for Profile {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "turk" => Ok(Profile::Turk),
            "stackoverflow" | "so" => Ok(Profile::StackOverflow),
            _ => Err(PipelineError::InvalidConfig(format!("unknown profile {s:?}"))),
        }
    }
}

/// How the sketches handed to the synthesizer are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ranking {
    /// Parser beam ordered by model score.
    Model,
    /// Parser beam reordered by covered tokens. The skip weight is forced to
    /// -1 during parsing so the beam keeps high-coverage parses.
    MaxCoverage,
    /// A single unconstrained hole, ignoring the description.
    EmptySketch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub beam: usize,
    /// Per-sketch synthesis timeout.
    pub timeout: Duration,
    /// Depth bounds tried in turn, from `min_depth` up to `depth`, while the
    /// search ends without a result and time remains.
    pub min_depth: usize,
    pub depth: usize,
    pub threads: usize,
    pub seed: u64,
    pub max_expansions: Option<u64>,
    pub ranking: Ranking,
    /// Include wall-clock times in records.
    pub record_timing: bool,
}

impl PipelineConfig {
    pub fn turk() -> PipelineConfig {
        PipelineConfig {
            beam: 20,
            timeout: Duration::from_secs(2),
            min_depth: 4,
            depth: 4,
            threads: 10,
            seed: 0,
            max_expansions: None,
            ranking: Ranking::Model,
            record_timing: false,
        }
    }

    pub fn stackoverflow() -> PipelineConfig {
        PipelineConfig {
            beam: 25,
            timeout: Duration::from_secs(30),
            depth: 6,
            ..PipelineConfig::turk()
        }
    }

    pub fn profile(p: Profile) -> PipelineConfig {
        match p {
            Profile::Turk => PipelineConfig::turk(),
            Profile::StackOverflow => PipelineConfig::stackoverflow(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::InvalidConfig(m.to_string()));
        if self.beam == 0 {
            return bad("beam must be at least 1");
        }
        if self.timeout.is_zero() {
            return bad("timeout must be positive");
        }
        if self.min_depth == 0 || self.min_depth > self.depth {
            return bad("depth bounds must satisfy 1 <= min_depth <= depth");
        }
        if self.threads == 0 {
            return bad("threads must be at least 1");
        }
        if self.max_expansions == Some(0) {
            return bad("expansion budget must be positive");
        }
        Ok(())
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            depth_bound: self.depth,
            timeout: self.timeout,
            max_expansions: self.max_expansions,
            ..SynthConfig::default()
        }
    }

    pub fn parse_config(&self) -> ParseConfig {
        ParseConfig { beam: self.beam, ..ParseConfig::default() }
    }

    fn pool(&self) -> Result<rayon::ThreadPool, PipelineError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| PipelineError::ThreadPool(e.to_string()))
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig::turk()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot start worker threads: {0}")]
    ThreadPool(String),
}

fn display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_opt<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchStatus {
    Consistent,
    NotFound,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SketchOutcome {
    pub rank: usize,
    #[serde(serialize_with = "display")]
    pub sketch: Sketch,
    pub score: f64,
    pub status: SketchStatus,
    #[serde(serialize_with = "display_opt", skip_serializing_if = "Option::is_none")]
    pub regex: Option<Regex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub expansions: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Solved,
    Failed,
    /// Some string is listed as both positive and negative.
    Contradictory,
    InvalidDescription,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub id: String,
    pub status: RunStatus,
    /// Beam index of the sketch that produced `regex`.
    pub rank: Option<usize>,
    #[serde(serialize_with = "display_opt")]
    pub regex: Option<Regex>,
    /// The parser produced nothing and an empty hole was used instead.
    pub empty_beam: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub sketches: Vec<SketchOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Ranked sketches for `description`; an error message if it does not tokenize.
pub fn decode_sketches(
    g: &Grammar,
    description: &str,
    w: &WeightVector,
    cfg: &PipelineConfig,
) -> Result<Vec<(Sketch, f64)>, String> {
    if cfg.ranking == Ranking::EmptySketch {
        return Ok(vec![]);
    }
    let tokens = tokenize(description).map_err(|e| e.to_string())?;
    let pcfg = cfg.parse_config();
    let parses = match cfg.ranking {
        Ranking::MaxCoverage => {
            let mut w = w.clone();
            w.set(SKIP_FEATURE, -1.0);
            max_coverage_rank(parse(g, &tokens, &w, &pcfg))
        }
        _ => parse(g, &tokens, w, &pcfg),
    };
    Ok(parses.into_iter().map(|p| (p.sketch, p.score)).collect())
}

fn synth_one(rank: usize, sketch: Sketch, score: f64, ex: &Examples, cfg: &PipelineConfig) -> SketchOutcome {
    let start = Instant::now();
    let mut out = SketchOutcome {
        rank,
        sketch,
        score,
        status: SketchStatus::Error,
        regex: None,
        error: None,
        expansions: 0,
        elapsed_ms: None,
    };
    for depth in cfg.min_depth..=cfg.depth {
        let left = cfg.timeout.saturating_sub(start.elapsed());
        if left.is_zero() {
            out.status = SketchStatus::Timeout;
            break;
        }
        let scfg = SynthConfig { depth_bound: depth, timeout: left, ..cfg.synth_config() };
        match synthesize(&out.sketch, ex, &scfg) {
            Ok(res) => {
                out.expansions += res.stats.expansions;
                match res.outcome {
                    Outcome::Found(r) if consistent(&r, ex) => {
                        out.status = SketchStatus::Consistent;
                        out.regex = Some(r);
                    }
                    Outcome::Found(r) => out.error = Some(format!("synthesized {r} is inconsistent")),
                    Outcome::NotFound => {
                        out.status = SketchStatus::NotFound;
                        continue;
                    }
                    Outcome::Timeout => out.status = SketchStatus::Timeout,
                }
            }
            Err(e) => out.error = Some(e.to_string()),
        }
        break;
    }
    if cfg.record_timing {
        out.elapsed_ms = Some(millis(start.elapsed()));
    }
    out
}

fn run_in_pool(g: &Grammar, b: &Benchmark, w: &WeightVector, cfg: &PipelineConfig) -> RunRecord {
    let start = Instant::now();
    let mut rec = RunRecord {
        id: b.id.clone(),
        status: RunStatus::Failed,
        rank: None,
        regex: None,
        empty_beam: false,
        message: None,
        sketches: vec![],
        elapsed_ms: None,
    };
    if let Some(w) = b.examples.contradiction() {
        rec.status = RunStatus::Contradictory;
        rec.message = Some(format!("{w:?} is both positive and negative"));
        return rec;
    }
    let mut sketches = match decode_sketches(g, &b.description, w, cfg) {
        Ok(s) => s,
        Err(msg) => {
            rec.status = RunStatus::InvalidDescription;
            rec.message = Some(msg);
            return rec;
        }
    };
    if sketches.is_empty() {
        rec.empty_beam = cfg.ranking != Ranking::EmptySketch;
        sketches.push((Sketch::empty_hole(), 0.0));
    }
    rec.sketches = sketches
        .into_par_iter()
        .enumerate()
        .map(|(i, (s, score))| synth_one(i, s, score, &b.examples, cfg))
        .collect();
    if let Some(best) = rec.sketches.iter().find(|o| o.status == SketchStatus::Consistent) {
        rec.status = RunStatus::Solved;
        rec.rank = Some(best.rank);
        rec.regex = best.regex.clone();
    }
    if cfg.record_timing {
        rec.elapsed_ms = Some(millis(start.elapsed()));
    }
    rec
}

/// Runs one benchmark: every beam sketch is synthesized in parallel and the
/// lowest-ranked consistent result is kept.
pub fn run_benchmark(
    g: &Grammar,
    b: &Benchmark,
    w: &WeightVector,
    cfg: &PipelineConfig,
) -> Result<RunRecord, PipelineError> {
    cfg.validate()?;
    Ok(cfg.pool()?.install(|| run_in_pool(g, b, w, cfg)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemReport {
    pub id: String,
    pub status: RunStatus,
    pub rank: Option<usize>,
    #[serde(serialize_with = "display_opt")]
    pub regex: Option<Regex>,
    /// Equivalent to the gold regex; absent without one.
    pub correct: Option<bool>,
    pub consistent: bool,
    /// Lowest beam index whose completion is equivalent to the gold regex.
    pub first_correct_rank: Option<usize>,
    pub timeouts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopN {
    pub n: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub items: usize,
    /// Items with a gold regex; the denominator of the accuracies.
    pub with_gold: usize,
    pub semantic_accuracy: f64,
    /// Over all items. Timeouts and other failures count as inconsistent.
    pub consistency: f64,
    pub top_n: Vec<TopN>,
    pub records: Vec<ItemReport>,
}

fn fraction(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn item_report(b: &Benchmark, rec: RunRecord) -> ItemReport {
    let equiv = |r: &Regex| b.gold_regex.as_ref().map(|g| equivalent(r, g).unwrap_or(false));
    let first_correct_rank = b.gold_regex.as_ref().and_then(|_| {
        rec.sketches
            .iter()
            .find(|o| o.regex.as_ref().and_then(equiv) == Some(true))
            .map(|o| o.rank)
    });
    ItemReport {
        correct: b.gold_regex.as_ref().map(|_| rec.regex.as_ref().and_then(equiv) == Some(true)),
        consistent: rec.regex.as_ref().is_some_and(|r| consistent(r, &b.examples)),
        first_correct_rank,
        timeouts: rec.sketches.iter().filter(|o| o.status == SketchStatus::Timeout).count(),
        id: rec.id,
        status: rec.status,
        rank: rec.rank,
        regex: rec.regex,
        elapsed_ms: rec.elapsed_ms,
    }
}

/// Runs every benchmark and scores the results. `top_n` lists the N values
/// for top-N accuracy: an item counts when any of its first N sketches
/// completes to a regex equivalent to the gold one.
pub fn evaluate(
    g: &Grammar,
    data: &[Benchmark],
    w: &WeightVector,
    cfg: &PipelineConfig,
    top_n: &[usize],
) -> Result<EvalReport, PipelineError> {
    cfg.validate()?;
    let records: Vec<ItemReport> = cfg.pool()?.install(|| {
        data.par_iter()
            .map(|b| item_report(b, run_in_pool(g, b, w, cfg)))
            .collect()
    });
    let with_gold = records.iter().filter(|r| r.correct.is_some()).count();
    let correct = records.iter().filter(|r| r.correct == Some(true)).count();
    let consistent = records.iter().filter(|r| r.consistent).count();
    let top_n = top_n
        .iter()
        .map(|&n| TopN {
            n,
            accuracy: fraction(
                records.iter().filter(|r| r.first_correct_rank.is_some_and(|k| k < n)).count(),
                with_gold,
            ),
        })
        .collect();
    Ok(EvalReport {
        items: records.len(),
        with_gold,
        semantic_accuracy: fraction(correct, with_gold),
        consistency: fraction(consistent, records.len()),
        top_n,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::shipped_grammar;
    use crate::regex::parse_regex;

    fn bench(id: &str, text: &str, gold: Option<&str>, pos: &[&str], neg: &[&str]) -> Benchmark {
        Benchmark {
            gold_regex: gold.map(|g| parse_regex(g).unwrap()),
            ..Benchmark::new(id, text, Examples::new(pos.iter().copied(), neg.iter().copied()))
        }
    }

    fn quick() -> PipelineConfig {
        PipelineConfig {
            min_depth: 3,
            depth: 3,
            timeout: Duration::from_secs(20),
            max_expansions: Some(50_000),
            threads: 4,
            ..PipelineConfig::turk()
        }
    }

    #[test]
    fn profiles() {
        let so: PipelineConfig = PipelineConfig::profile("stackoverflow".parse().unwrap());
        assert_eq!((so.beam, so.timeout, so.min_depth, so.depth), (25, Duration::from_secs(30), 4, 6));
        let t = PipelineConfig::default();
        assert_eq!((t.beam, t.timeout, t.depth, t.threads), (20, Duration::from_secs(2), 4, 10));
        assert!("kb13".parse::<Profile>().is_err());
        assert!(PipelineConfig { threads: 0, ..t }.validate().is_err());
    }

    #[test]
    fn contradictory_examples_are_flagged() {
        let g = shipped_grammar();
        let b = bench("c", "digit", None, &["1", "2"], &["2"]);
        let rec = run_benchmark(&g, &b, &WeightVector::new(), &quick()).unwrap();
        assert_eq!(rec.status, RunStatus::Contradictory);
        assert!(rec.sketches.is_empty() && rec.regex.is_none());
    }

    #[test]
    fn empty_sketch_mode_finds_a_regex() {
        let g = shipped_grammar();
        let b = bench("e", "ignored", None, &["5"], &["a"]);
        let cfg = PipelineConfig { ranking: Ranking::EmptySketch, ..quick() };
        let rec = run_benchmark(&g, &b, &WeightVector::new(), &cfg).unwrap();
        assert_eq!(rec.status, RunStatus::Solved);
        assert_eq!(rec.sketches.len(), 1);
        assert_eq!(rec.sketches[0].sketch, Sketch::empty_hole());
        assert!(!rec.empty_beam);
        assert!(consistent(rec.regex.as_ref().unwrap(), &b.examples));
    }

    #[test]
    fn unparsable_description_falls_back_to_empty_hole() {
        let g = shipped_grammar();
        let b = bench("u", "zzz qqq", None, &["5"], &["a"]);
        let rec = run_benchmark(&g, &b, &WeightVector::new(), &quick()).unwrap();
        assert!(rec.empty_beam);
        assert_eq!(rec.status, RunStatus::Solved);
        let bad = bench("q", "an \"open quote", None, &["5"], &["a"]);
        let rec = run_benchmark(&g, &bad, &WeightVector::new(), &quick()).unwrap();
        assert_eq!(rec.status, RunStatus::InvalidDescription);
    }

    #[test]
    fn rank_is_first_consistent_sketch() {
        let g = shipped_grammar();
        let b = bench("r", "3 digit", Some("Repeat(<num>,3)"), &["123", "000"], &["12", "1234", "abc"]);
        let rec = run_benchmark(&g, &b, &WeightVector::new(), &quick()).unwrap();
        assert_eq!(rec.status, RunStatus::Solved);
        let first = rec.sketches.iter().position(|o| o.status == SketchStatus::Consistent);
        assert_eq!(rec.rank, first);
        assert!(rec.sketches.iter().enumerate().all(|(i, o)| o.rank == i));
    }

    #[test]
    fn evaluation_metrics() {
        let g = shipped_grammar();
        let data = [
            bench("a", "3 digit", Some("Repeat(<num>,3)"), &["123", "000"], &["12", "1234", "abc"]),
            // the examples do not pin down the gold regex
            bench("b", "digit", Some("Or(<num>,<let>)"), &["1"], &["-"]),
            bench("c", "digit", None, &["1"], &["1"]),
        ];
        let report = evaluate(&g, &data, &WeightVector::new(), &quick(), &[1, 5, 20]).unwrap();
        assert_eq!((report.items, report.with_gold), (3, 2));
        let [a, b, c] = &report.records[..] else { panic!() };
        assert_eq!((a.correct, a.consistent), (Some(true), true));
        assert_eq!((b.correct, b.consistent), (Some(false), true));
        assert_eq!((c.correct, c.consistent), (None, false));
        assert_eq!(report.semantic_accuracy, 0.5);
        assert!((report.consistency - 2.0 / 3.0).abs() < 1e-12);
        assert!(report.consistency >= report.semantic_accuracy);
        let acc: Vec<f64> = report.top_n.iter().map(|t| t.accuracy).collect();
        assert!(acc.windows(2).all(|w| w[0] <= w[1]));
        let json = serde_json::to_string(&report).unwrap();
        assert!(!json.contains("elapsed_ms"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let g = shipped_grammar();
        let data = [
            bench("a", "3 digit", Some("Repeat(<num>,3)"), &["123", "000"], &["12", "1234", "abc"]),
            bench("b", "letter or digit", Some("Or(<let>,<num>)"), &["a", "1"], &["-", "a1"]),
        ];
        let one = evaluate(&g, &data, &WeightVector::new(), &PipelineConfig { threads: 1, ..quick() }, &[1]).unwrap();
        let ten = evaluate(&g, &data, &WeightVector::new(), &PipelineConfig { threads: 10, ..quick() }, &[1]).unwrap();
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&ten).unwrap());
    }
}
