use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::automata::equivalent;
use crate::examplegen::Examples;
use crate::grammar::{
    extract_features, parse, parse_filtered, FeatureMap, Grammar, Parse, Token, Value, WeightVector,
};
use crate::regex::{Regex, Sketch};
use crate::synth::{synthesize, Outcome, SynthConfig};

use super::{TrainConfig, TrainError};

#[derive(Debug, Clone, PartialEq)]
pub struct MleItem {
    pub tokens: Vec<Token>,
    pub gold: Sketch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmlItem {
    pub tokens: Vec<Token>,
    pub gold: Regex,
    pub examples: Examples,
}

/// Per-item log-likelihood and its gradient with respect to the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemGradient {
    pub log_likelihood: f64,
    pub gradient: FeatureMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean log-likelihood over items that contributed a gradient.
    pub objective: f64,
    /// Items without a gold derivation (MLE) or a correct sketch (MML).
    pub skipped: usize,
    /// Sketch syntheses that ran out of budget (MML).
    pub timeouts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub weights: WeightVector,
    pub log: Vec<EpochLog>,
}

impl TrainReport {
    /// Skipped items in the last epoch.
    pub fn skipped(&self) -> usize {
        self.log.last().map_or(0, |l| l.skipped)
    }

    pub fn log_csv(&self) -> String {
        let mut out = String::from("epoch,objective,skipped,timeouts\n");
        for l in &self.log {
            let _ = writeln!(out, "{},{:.6},{},{}", l.epoch, l.objective, l.skipped, l.timeouts);
        }
        out
    }
}

fn sketch_subterms(s: &Sketch, out: &mut HashSet<Sketch>, hole_suffixes: &mut HashSet<Vec<Sketch>>) {
    out.insert(s.clone());
    if let Sketch::Hole(comps) = s {
        for i in 0..comps.len() {
            hole_suffixes.insert(comps[i..].to_vec());
        }
    }
    for c in s.children() {
        sketch_subterms(c, out, hole_suffixes);
    }
}

/// Best derivation of `gold`: from `beam` when present there, otherwise from
/// a parse restricted to values that can occur while building `gold`.
pub fn gold_derivation(
    g: &Grammar,
    tokens: &[Token],
    gold: &Sketch,
    w: &WeightVector,
    cfg: &TrainConfig,
    beam: &[Parse],
) -> Option<Parse> {
    if let Some(p) = beam.iter().find(|p| &p.sketch == gold) {
        return Some(p.clone());
    }
    let mut subterms = HashSet::new();
    let mut suffixes = HashSet::new();
    sketch_subterms(gold, &mut subterms, &mut suffixes);
    let fits = |v: &Value| match v {
        Value::Sketch(Sketch::Hole(comps)) => suffixes.contains(comps) || subterms.contains(&Sketch::Hole(comps.clone())),
        Value::Sketch(s) => subterms.contains(s),
        Value::Set(_) => v.as_sketch().is_some_and(|s| subterms.contains(&s)),
        _ => true,
    };
    parse_filtered(g, tokens, w, &cfg.parse_config(), Some(&fits))
        .into_iter()
        .find(|p| &p.sketch == gold)
}

/// Log-normalizer and expected features of a scored set of derivations.
fn expectation(scored: &[(f64, &FeatureMap)]) -> (f64, FeatureMap) {
    let max = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scored.iter().map(|s| (s.0 - max).exp()).sum();
    let log_z = max + z.ln();
    let mut e = FeatureMap::new();
    for (s, f) in scored {
        let p = (s - log_z).exp();
        for (k, v) in f.iter() {
            *e.entry(k.clone()).or_insert(0.0) += p * v;
        }
    }
    (log_z, e)
}

fn sub(a: &FeatureMap, b: &FeatureMap) -> FeatureMap {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(k.clone()).or_insert(0.0) -= v;
    }
    out.retain(|_, v| *v != 0.0);
    out
}

/// MLE log-likelihood and gradient of one item, normalized over the beam
/// plus the gold derivation. `None` when the gold sketch is not derivable.
pub fn mle_item(g: &Grammar, item: &MleItem, w: &WeightVector, cfg: &TrainConfig) -> Option<ItemGradient> {
    let beam = parse(g, &item.tokens, w, &cfg.parse_config());
    let gold = gold_derivation(g, &item.tokens, &item.gold, w, cfg, &beam)?;
    let feats = |p: &Parse| extract_features(&p.derivation, g, &item.tokens, &cfg.templates);
    let gold_f = feats(&gold);
    let mut set: Vec<(f64, FeatureMap)> = beam
        .iter()
        .filter(|p| p.sketch != item.gold)
        .map(|p| (p.score, feats(p)))
        .collect();
    set.push((gold.score, gold_f.clone()));
    let refs: Vec<(f64, &FeatureMap)> = set.iter().map(|(s, f)| (*s, f)).collect();
    let (log_z, expected) = expectation(&refs);
    Some(ItemGradient {
        log_likelihood: gold.score - log_z,
        gradient: sub(&gold_f, &expected),
    })
}

/// Regularized MLE objective over `items` and its gradient.
pub fn mle_objective_and_gradient(
    g: &Grammar,
    items: &[MleItem],
    w: &WeightVector,
    cfg: &TrainConfig,
) -> (f64, FeatureMap) {
    let mut obj = -0.5 * cfg.l2 * w.squared_norm();
    let mut grad = FeatureMap::new();
    for (k, v) in w.iter() {
        grad.insert(k.to_string(), -cfg.l2 * v);
    }
    for item in items {
        if let Some(ig) = mle_item(g, item, w, cfg) {
            obj += ig.log_likelihood;
            for (k, v) in ig.gradient {
                *grad.entry(k).or_insert(0.0) += v;
            }
        }
    }
    (obj, grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Correct,
    Incorrect,
    Timeout,
}

fn label(sketch: &Sketch, item: &MmlItem, synth: &SynthConfig) -> Label {
    match synthesize(sketch, &item.examples, synth) {
        Ok(res) => match res.outcome {
            Outcome::Found(r) if equivalent(&r, &item.gold).unwrap_or(false) => Label::Correct,
            Outcome::Timeout => Label::Timeout,
            _ => Label::Incorrect,
        },
        Err(_) => Label::Incorrect,
    }
}

struct Step {
    gradient: Option<ItemGradient>,
    timeouts: usize,
    labels: Vec<(Sketch, Label)>,
}

/// MML log-likelihood and gradient of one item: expected features over the
/// beam sketches whose synthesis is equivalent to the gold regex, minus
/// expected features over the whole beam. `None` when no sketch is correct.
pub fn mml_item(
    g: &Grammar,
    item: &MmlItem,
    w: &WeightVector,
    cfg: &TrainConfig,
    synth: &SynthConfig,
) -> Option<ItemGradient> {
    mml_step(g, item, w, cfg, synth, &HashMap::new()).gradient
}

fn mml_step(
    g: &Grammar,
    item: &MmlItem,
    w: &WeightVector,
    cfg: &TrainConfig,
    synth: &SynthConfig,
    cache: &HashMap<Sketch, Label>,
) -> Step {
    let beam = parse(g, &item.tokens, w, &cfg.parse_config());
    let mut labels = vec![];
    let mut timeouts = 0;
    let mut correct = vec![false; beam.len()];
    for (i, p) in beam.iter().enumerate() {
        let l = match cache.get(&p.sketch) {
            Some(&l) => l,
            None => {
                let l = label(&p.sketch, item, synth);
                labels.push((p.sketch.clone(), l));
                l
            }
        };
        timeouts += usize::from(l == Label::Timeout);
        correct[i] = l == Label::Correct;
    }
    let gradient = correct.contains(&true).then(|| {
        let feats: Vec<FeatureMap> = beam
            .iter()
            .map(|p| extract_features(&p.derivation, g, &item.tokens, &cfg.templates))
            .collect();
        let all: Vec<(f64, &FeatureMap)> = beam.iter().zip(&feats).map(|(p, f)| (p.score, f)).collect();
        let good: Vec<(f64, &FeatureMap)> = all
            .iter()
            .zip(&correct)
            .filter(|(_, c)| **c)
            .map(|(x, _)| *x)
            .collect();
        let (log_z, e_all) = expectation(&all);
        let (log_zc, e_good) = expectation(&good);
        ItemGradient {
            log_likelihood: log_zc - log_z,
            gradient: sub(&e_good, &e_all),
        }
    });
    Step { gradient, timeouts, labels }
}

/// Minibatch gradient ascent. `step` computes one item's contribution at the
/// current weights given its cached synthesis labels.
fn sgd<F>(n: usize, cfg: &TrainConfig, init: WeightVector, step: F) -> Result<TrainReport, TrainError>
where
    F: Fn(usize, &WeightVector, &HashMap<Sketch, Label>) -> Step + Sync,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = init;
    let mut caches: Vec<HashMap<Sketch, Label>> = vec![HashMap::new(); n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut log = vec![];
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let (mut total, mut used, mut skipped, mut timeouts) = (0.0, 0usize, 0usize, 0usize);
        for batch in order.chunks(cfg.batch_size) {
            let steps: Vec<Step> = batch.par_iter().map(|&i| step(i, &w, &caches[i])).collect();
            let mut sum = FeatureMap::new();
            for (&i, s) in batch.iter().zip(steps) {
                caches[i].extend(s.labels);
                timeouts += s.timeouts;
                match s.gradient {
                    Some(ig) => {
                        total += ig.log_likelihood;
                        used += 1;
                        for (k, v) in ig.gradient {
                            *sum.entry(k).or_insert(0.0) += v;
                        }
                    }
                    None => skipped += 1,
                }
            }
            w.scale(1.0 - cfg.learning_rate * cfg.l2);
            w.add_scaled(&sum, cfg.learning_rate / batch.len() as f64);
        }
        let objective = if used > 0 { total / used as f64 } else { 0.0 };
        log::info!("epoch {epoch}: objective {objective:.4}, skipped {skipped}, timeouts {timeouts}");
        log.push(EpochLog { epoch, objective, skipped, timeouts });
    }
    Ok(TrainReport { weights: w, log })
}

/// Trains from zero weights on gold sketches.
pub fn train_mle(g: &Grammar, data: &[MleItem], cfg: &TrainConfig) -> Result<TrainReport, TrainError> {
    sgd(data.len(), cfg, WeightVector::new(), |i, w, _| Step {
        gradient: mle_item(g, &data[i], w, cfg),
        timeouts: 0,
        labels: vec![],
    })
}

/// Trains from `init` on gold regexes, labelling beam sketches by synthesis.
/// Synthesis results are cached per item and sketch across epochs.
pub fn train_mml(
    g: &Grammar,
    data: &[MmlItem],
    cfg: &TrainConfig,
    synth: &SynthConfig,
    init: WeightVector,
) -> Result<TrainReport, TrainError> {
    sgd(data.len(), cfg, init, |i, w, cache| mml_step(g, &data[i], w, cfg, synth, cache))
}
