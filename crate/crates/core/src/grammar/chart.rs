use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::features::{
    bigram_feature, rule_feature, rule_token_feature, FeatureMap, FeatureTemplates, WeightVector,
    SKIP_FEATURE,
};
use super::rules::{Action, CatId, Grammar, Selector, Symbol, NUMBER, PHRASE};
use super::semfn::{apply_semfn, Value};
use super::tokenize::Token;
use crate::regex::Sketch;

pub const DEFAULT_BEAM: usize = 20;
/// Unary rule applications allowed on top of one span's derivations.
pub const DEFAULT_UNARY_LIMIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseConfig {
    /// Sketches returned, and derivations kept per category and span.
    pub beam: usize,
    pub unary_limit: usize,
    pub templates: FeatureTemplates,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            beam: DEFAULT_BEAM,
            unary_limit: DEFAULT_UNARY_LIMIT,
            templates: FeatureTemplates::default(),
        }
    }
}

/// What produced a derivation node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Producer {
    Rule(usize),
    /// Built-in token category (`$NUMBER`, `$PHRASE`).
    Token(CatId),
}

#[derive(Debug)]
pub struct Derivation {
    pub producer: Producer,
    pub cat: CatId,
    /// Covered tokens, skipped ones included.
    pub start: usize,
    pub end: usize,
    /// Tokens skipped before and after the rule's own material.
    pub skip_left: usize,
    pub skip_right: usize,
    pub children: Vec<Arc<Derivation>>,
    pub value: Value,
    pub score: f64,
    skipped: usize,
    key: String,
}

impl Derivation {
    /// Tokens skipped anywhere in the tree.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// Tokens not skipped.
    pub fn covered(&self) -> usize {
        self.end - self.start - self.skipped
    }

    /// Canonical serialization used to break score ties.
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn name<'g>(&self, g: &'g Grammar) -> &'g str {
        match self.producer {
            Producer::Rule(r) => &g.rules()[r].name,
            Producer::Token(c) => g.category_name(c),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Rule applications in preorder.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }
}

/// Feature counts of a whole derivation tree.
pub fn extract_features(
    d: &Derivation,
    g: &Grammar,
    tokens: &[Token],
    templates: &FeatureTemplates,
) -> FeatureMap {
    let mut out = FeatureMap::new();
    for node in d.nodes() {
        let name = node.name(g);
        let mut add = |f: String, v: f64| *out.entry(f).or_insert(0.0) += v;
        if templates.rule {
            add(rule_feature(name), 1.0);
        }
        if templates.rule_token {
            for t in &tokens[node.start + node.skip_left..node.end - node.skip_right] {
                add(rule_token_feature(name, &t.to_string()), 1.0);
            }
        }
        if templates.bigram {
            for c in &node.children {
                add(bigram_feature(name, c.name(g)), 1.0);
            }
        }
        let skips = node.skip_left + node.skip_right;
        if templates.skip && skips > 0 {
            add(SKIP_FEATURE.to_string(), skips as f64);
        }
    }
    out
}

/// A root derivation and its sketch.
#[derive(Debug, Clone)]
pub struct Parse {
    pub sketch: Sketch,
    pub score: f64,
    pub derivation: Arc<Derivation>,
}

/// Weight lookups memoized for one sentence.
struct Scorer<'a> {
    g: &'a Grammar,
    w: &'a WeightVector,
    tokens: Vec<String>,
    t: FeatureTemplates,
    rule: HashMap<Producer, f64>,
    rule_tok: HashMap<(Producer, usize), f64>,
    bigram: HashMap<(Producer, Producer), f64>,
}

impl Scorer<'_> {
    fn name(&self, p: Producer) -> &str {
        match p {
            Producer::Rule(r) => &self.g.rules()[r].name,
            Producer::Token(c) => self.g.category_name(c),
        }
    }

    fn local(&mut self, p: Producer, core: (usize, usize), children: &[Arc<Derivation>]) -> f64 {
        let mut s = 0.0;
        if self.t.rule {
            s += match self.rule.get(&p) {
                Some(&v) => v,
                None => {
                    let v = self.w.get(&rule_feature(self.name(p)));
                    self.rule.insert(p, v);
                    v
                }
            };
        }
        if self.t.rule_token {
            for i in core.0..core.1 {
                s += match self.rule_tok.get(&(p, i)) {
                    Some(&v) => v,
                    None => {
                        let v = self.w.get(&rule_token_feature(self.name(p), &self.tokens[i]));
                        self.rule_tok.insert((p, i), v);
                        v
                    }
                };
            }
        }
        if self.t.bigram {
            for c in children {
                s += match self.bigram.get(&(p, c.producer)) {
                    Some(&v) => v,
                    None => {
                        let v = self.w.get(&bigram_feature(self.name(p), self.name(c.producer)));
                        self.bigram.insert((p, c.producer), v);
                        v
                    }
                };
            }
        }
        s
    }

    fn skip(&self) -> f64 {
        if self.t.skip {
            self.w.get(SKIP_FEATURE)
        } else {
            0.0
        }
    }
}

type Cell = Vec<Vec<Arc<Derivation>>>;

struct Chart<'a> {
    g: &'a Grammar,
    tokens: &'a [Token],
    cfg: ParseConfig,
    scorer: Scorer<'a>,
    filter: Option<&'a dyn Fn(&Value) -> bool>,
    /// cells[start][len - 1]
    cells: Vec<Vec<Cell>>,
    lexical_at: Vec<Vec<usize>>,
    unary_from: Vec<Vec<usize>>,
    compositional: Vec<usize>,
}

/// Key without the skip prefix added by `with_skip`.
fn base_key(key: &str) -> &str {
    match key.strip_prefix('s') {
        Some(rest) => rest.split_once(':').map_or(key, |(_, b)| b),
        None => key,
    }
}

fn order(a: &Arc<Derivation>, b: &Arc<Derivation>) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.key.cmp(&b.key))
}

impl<'a> Chart<'a> {
    fn cell(&self, start: usize, end: usize) -> &Cell {
        &self.cells[start][end - start - 1]
    }

    /// Longest lexical phrases starting at each position.
    fn lexical_matches(g: &Grammar, tokens: &[Token]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]; tokens.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut best = 0;
            for (r, rule) in g.rules().iter().enumerate() {
                if !rule.is_lexical() || i + rule.lhs.len() > tokens.len() {
                    continue;
                }
                let hit = rule.lhs.iter().zip(&tokens[i..]).all(|(s, t)| match (s, t) {
                    (Symbol::Word(w), Token::Word(tw)) => w == tw,
                    _ => false,
                });
                if !hit {
                    continue;
                }
                let len = rule.lhs.len();
                if len > best {
                    best = len;
                    slot.clear();
                }
                if len == best {
                    slot.push(r);
                }
            }
        }
        out
    }

    fn make(
        &mut self,
        producer: Producer,
        cat: CatId,
        span: (usize, usize),
        children: Vec<Arc<Derivation>>,
        value: Value,
    ) -> Option<Arc<Derivation>> {
        if let Some(f) = self.filter {
            if !f(&value) {
                return None;
            }
        }
        let local = self.scorer.local(producer, span, &children);
        let score = local + children.iter().map(|c| c.score).sum::<f64>();
        let skipped = children.iter().map(|c| c.skipped).sum();
        let tag = match producer {
            Producer::Rule(r) => format!("r{r}"),
            Producer::Token(c) => format!("t{c}"),
        };
        let mut key = format!("{tag}[{},{}](", span.0, span.1);
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                key.push(' ');
            }
            key.push_str(&c.key);
        }
        key.push(')');
        Some(Arc::new(Derivation {
            producer,
            cat,
            start: span.0,
            end: span.1,
            skip_left: 0,
            skip_right: 0,
            children,
            value,
            score,
            skipped,
            key,
        }))
    }

    fn with_skip(&self, d: &Derivation, left: bool) -> Arc<Derivation> {
        let (start, end, sl, sr) = if left {
            (d.start - 1, d.end, d.skip_left + 1, d.skip_right)
        } else {
            (d.start, d.end + 1, d.skip_left, d.skip_right + 1)
        };
        Arc::new(Derivation {
            producer: d.producer,
            cat: d.cat,
            start,
            end,
            skip_left: sl,
            skip_right: sr,
            children: d.children.clone(),
            value: d.value.clone(),
            score: d.score + self.scorer.skip(),
            skipped: d.skipped + 1,
            key: format!("s{sl},{sr}:{}", base_key(&d.key)),
        })
    }

    fn apply(
        &mut self,
        r: usize,
        span: (usize, usize),
        children: Vec<Arc<Derivation>>,
        positions: &[Option<usize>],
    ) -> Option<Arc<Derivation>> {
        let rule = &self.g.rules()[r];
        let value = match &rule.action {
            Action::Constant(v) => v.clone(),
            Action::Apply(f, sels) => {
                let mut args = vec![];
                for sel in sels {
                    match *sel {
                        Selector::Arg(i) => args.push(match (&rule.lhs[i], positions[i]) {
                            (Symbol::Cat(_), Some(ci)) => children[ci].value.clone(),
                            (Symbol::Word(w), _) => Value::Text(w.clone()),
                            _ => return None,
                        }),
                        Selector::Val(n) => args.push(Value::Int(n)),
                        Selector::Null => {}
                    }
                }
                match apply_semfn(*f, &args) {
                    Ok(v) => v,
                    Err(e) => {
                        log::trace!("rule {} fails: {e}", rule.name);
                        return None;
                    }
                }
            }
        };
        let target = rule.target;
        self.make(Producer::Rule(r), target, span, children, value)
    }

    /// Ways to lay the symbols of a compositional rule over `start..end`,
    /// as the cell span chosen for every category symbol.
    fn layouts(&self, lhs: &[Symbol], start: usize, end: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![];
        let mut cur = vec![];
        self.layouts_rec(lhs, start, end, &mut cur, &mut out);
        out
    }

    fn layouts_rec(
        &self,
        lhs: &[Symbol],
        pos: usize,
        end: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some((first, rest)) = lhs.split_first() else {
            if pos == end {
                out.push(cur.clone());
            }
            return;
        };
        if end - pos < lhs.len() {
            return;
        }
        match first {
            Symbol::Word(w) => {
                if matches!(&self.tokens[pos], Token::Word(t) if t == w) {
                    self.layouts_rec(rest, pos + 1, end, cur, out);
                }
            }
            Symbol::Cat(c) => {
                for q in pos + 1..=end - rest.len() {
                    if self.cell(pos, q)[*c].is_empty() {
                        continue;
                    }
                    cur.push((pos, q));
                    self.layouts_rec(rest, q, end, cur, out);
                    cur.pop();
                }
            }
        }
    }

    fn compose(&mut self, start: usize, end: usize, fresh: &mut Cell) {
        for ci in 0..self.compositional.len() {
            let r = self.compositional[ci];
            let lhs = self.g.rules()[r].lhs.clone();
            let cats: Vec<CatId> = lhs
                .iter()
                .filter_map(|s| match s {
                    Symbol::Cat(c) => Some(*c),
                    Symbol::Word(_) => None,
                })
                .collect();
            let mut positions = vec![None; lhs.len()];
            let mut k = 0;
            for (i, s) in lhs.iter().enumerate() {
                if matches!(s, Symbol::Cat(_)) {
                    positions[i] = Some(k);
                    k += 1;
                }
            }
            for layout in self.layouts(&lhs, start, end) {
                let lists: Vec<Vec<Arc<Derivation>>> = layout
                    .iter()
                    .zip(&cats)
                    .map(|(&(a, b), &c)| self.cell(a, b)[c].clone())
                    .collect();
                // combinations whose rank sum stays within the beam
                let mut ranks = vec![0usize; lists.len()];
                loop {
                    if ranks.iter().sum::<usize>() < self.cfg.beam {
                        let children: Vec<_> =
                            ranks.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect();
                        if let Some(d) = self.apply(r, (start, end), children, &positions) {
                            fresh[d.cat].push(d);
                        }
                    }
                    let mut i = 0;
                    loop {
                        if i == ranks.len() {
                            break;
                        }
                        ranks[i] += 1;
                        if ranks[i] < lists[i].len() && ranks.iter().sum::<usize>() < self.cfg.beam {
                            break;
                        }
                        ranks[i] = 0;
                        i += 1;
                    }
                    if i == ranks.len() {
                        break;
                    }
                }
            }
        }
    }

    fn prune(&self, list: &mut Vec<Arc<Derivation>>) {
        list.sort_by(order);
        let mut seen = HashSet::new();
        list.retain(|d| seen.insert(d.value.clone()));
        list.truncate(self.cfg.beam);
    }

    fn fill(&mut self, start: usize, end: usize) {
        let ncat = self.g.num_categories();
        let mut fresh: Cell = vec![vec![]; ncat];
        if end - start == 1 {
            let builtin = match &self.tokens[start] {
                Token::Int(n) => Some((NUMBER, Value::Int(*n))),
                Token::Const(s) => Some((PHRASE, Value::Text(s.clone()))),
                Token::Word(_) => None,
            };
            if let Some((name, v)) = builtin {
                let c = self.g.category(name).expect("built-in category");
                if let Some(d) = self.make(Producer::Token(c), c, (start, end), vec![], v) {
                    fresh[c].push(d);
                }
            }
        }
        for r in self.lexical_at[start].clone() {
            if start + self.g.rules()[r].lhs.len() == end {
                let positions = vec![None; self.g.rules()[r].lhs.len()];
                if let Some(d) = self.apply(r, (start, end), vec![], &positions) {
                    fresh[d.cat].push(d);
                }
            }
        }
        if end - start >= 2 {
            self.compose(start, end, &mut fresh);
        }
        // unary closure over newly built derivations
        let mut frontier: Vec<Arc<Derivation>> = vec![];
        for list in fresh.iter_mut() {
            self.prune(list);
            frontier.extend(list.iter().cloned());
        }
        for _ in 0..self.cfg.unary_limit {
            let mut next = vec![];
            for d in &frontier {
                for ri in 0..self.unary_from[d.cat].len() {
                    let r = self.unary_from[d.cat][ri];
                    if let Some(u) = self.apply(r, (start, end), vec![d.clone()], &[Some(0)]) {
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            for d in &next {
                fresh[d.cat].push(d.clone());
            }
            frontier = next;
        }
        // skipped tokens attach on the left of any category, and on the
        // right of the root
        if end - start >= 2 {
            let root = self.g.root();
            for c in 0..ncat {
                let inner: Vec<_> = self.cell(start + 1, end)[c].clone();
                for d in inner {
                    fresh[c].push(self.with_skip(&d, true));
                }
            }
            let inner: Vec<_> = self.cell(start, end - 1)[root].clone();
            for d in inner {
                fresh[root].push(self.with_skip(&d, false));
            }
        }
        for list in fresh.iter_mut() {
            self.prune(list);
        }
        self.cells[start][end - start - 1] = fresh;
    }
}

/// k-best distinct sketches of `$ROOT` derivations over all of `tokens`.
pub fn parse(g: &Grammar, tokens: &[Token], weights: &WeightVector, cfg: &ParseConfig) -> Vec<Parse> {
    parse_filtered(g, tokens, weights, cfg, None)
}

/// Like [`parse`], but every intermediate value must pass `filter`.
pub fn parse_filtered(
    g: &Grammar,
    tokens: &[Token],
    weights: &WeightVector,
    cfg: &ParseConfig,
    filter: Option<&dyn Fn(&Value) -> bool>,
) -> Vec<Parse> {
    let n = tokens.len();
    if n == 0 || g.is_empty() || cfg.beam == 0 {
        return vec![];
    }
    let mut unary_from = vec![vec![]; g.num_categories()];
    let mut compositional = vec![];
    for (r, rule) in g.rules().iter().enumerate() {
        if rule.is_unary() {
            if let Symbol::Cat(c) = rule.lhs[0] {
                unary_from[c].push(r);
            }
        } else if !rule.is_lexical() {
            compositional.push(r);
        }
    }
    let mut chart = Chart {
        g,
        tokens,
        cfg: *cfg,
        scorer: Scorer {
            g,
            w: weights,
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            t: cfg.templates,
            rule: HashMap::new(),
            rule_tok: HashMap::new(),
            bigram: HashMap::new(),
        },
        filter,
        cells: (0..n).map(|i| vec![vec![]; n - i]).collect(),
        lexical_at: Chart::lexical_matches(g, tokens),
        unary_from,
        compositional,
    };
    for len in 1..=n {
        for start in 0..=n - len {
            chart.fill(start, start + len);
        }
    }
    let mut out: Vec<Parse> = vec![];
    let mut seen = HashSet::new();
    for d in &chart.cell(0, n)[g.root()] {
        let Some(sketch) = d.value.as_sketch() else {
            continue;
        };
        if seen.insert(sketch.clone()) {
            out.push(Parse { sketch, score: d.score, derivation: d.clone() });
        }
        if out.len() == cfg.beam {
            break;
        }
    }
    out
}
