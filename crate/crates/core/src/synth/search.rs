use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::examplegen::Examples;
use crate::regex::{sketch_matches, Sketch};

use super::arena::{Arena, NodeId};
use super::infix::InfixTable;
use super::space::Space;
use super::{consistent, Outcome, SynthConfig, SynthResult, SynthStats};

/// Cap on distinct subtrees kept by one search; reaching it ends the search
/// as a timeout.
const NODE_LIMIT: usize = 8_000_000;

struct Entry {
    overlap: u32,
    size: u32,
    seq: u64,
    node: NodeId,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.overlap
            .cmp(&other.overlap)
            .then(other.size.cmp(&self.size))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

struct Worklist {
    heap: BinaryHeap<Entry>,
    /// Smallest size queued per (semantic key, realized components).
    best_size: HashMap<(u32, u64), u32>,
    seq: u64,
}

impl Worklist {
    /// Queues `id` unless it is infeasible or an equivalent partial program of
    /// no larger size was queued before.
    fn offer(&mut self, arena: &Arena, id: NodeId, stats: &mut SynthStats) {
        stats.generated += 1;
        if !arena.feasible(id) {
            stats.pruned += 1;
            return;
        }
        let n = arena.node(id);
        match self.best_size.get_mut(&(n.sem, n.mask)) {
            Some(best) if *best <= n.size => {
                stats.duplicates += 1;
                return;
            }
            Some(best) => *best = n.size,
            None => {
                self.best_size.insert((n.sem, n.mask), n.size);
            }
        }
        self.seq += 1;
        self.heap.push(Entry {
            overlap: n.mask.count_ones(),
            size: n.size,
            seq: self.seq,
            node: id,
        });
    }
}

pub(crate) fn run(sketch: &Sketch, examples: &Examples, cfg: &SynthConfig) -> SynthResult {
    let started = Instant::now();
    let deadline = started + cfg.timeout;
    let space = Space::new(sketch, &examples.positives, cfg);
    let mut arena = Arena::new(InfixTable::new(&examples.positives, &examples.negatives), sketch);
    let mut stats = SynthStats::default();
    let mut work = Worklist {
        heap: BinaryHeap::new(),
        best_size: HashMap::new(),
        seq: 0,
    };
    let root = arena.import(sketch);
    if arena.node(root).min_depth as usize <= cfg.depth_bound {
        work.offer(&arena, root, &mut stats);
    }
    let outcome = loop {
        let Some(entry) = work.heap.pop() else {
            break Outcome::NotFound;
        };
        if Instant::now() >= deadline
            || cfg.max_expansions.is_some_and(|m| stats.expansions >= m)
        {
            break Outcome::Timeout;
        }
        stats.expansions += 1;
        if !arena.node(entry.node).has_hole {
            let r = arena.regex(entry.node).expect("hole-free");
            // example bounds are exact for hole-free programs; confirm with
            // the automaton semantics anyway
            if consistent(&r, examples) && sketch_matches(sketch, &r) {
                break Outcome::Found(r);
            }
            log::error!("candidate {r} passed the example table but not the matcher");
            continue;
        }
        for child in arena.expand(entry.node, &space) {
            work.offer(&arena, child, &mut stats);
        }
        if work.heap.len() > cfg.max_worklist || arena.len() > NODE_LIMIT {
            log::debug!("search budget exhausted after {} expansions", stats.expansions);
            break Outcome::Timeout;
        }
    };
    stats.elapsed = started.elapsed();
    SynthResult { outcome, stats }
}
