//! Hash-consed partial programs.
//!
//! Every distinct subtree is stored once together with its example bounds,
//! the hole components it realizes and a semantic key, so filling a hole
//! only evaluates the nodes on the path from that hole to the root.

use std::collections::HashMap;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::regex::{sketch_matches, BinaryOp, CharClass, CharSet, Count, Regex, Sketch, UnaryOp};

use super::space::{Space, Template};
use super::infix::{InfixTable, Sig};

pub(crate) type NodeId = u32;
type SigId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    /// Index into the arena's component lists; list 0 is empty.
    Hole(u32),
    Class(CharClass),
    Lit(char),
    Unary(UnaryOp, NodeId),
    Binary(BinaryOp, NodeId, NodeId),
    Repeat(Count, NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum SigOp {
    Unary(UnaryOp),
    Binary(BinaryOp),
    Repeat(Count),
}

/// Identifies partial programs that behave identically on the examples: the
/// same shape around the holes, with every hole-free subtree replaced by the
/// infixes it accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum SemKey {
    Sig(SigId),
    Hole(u32),
    Unary(UnaryOp, u32),
    Binary(BinaryOp, u32, u32),
    Repeat(Count, u32),
}

pub(crate) struct Node {
    kind: Kind,
    /// Bounds over all completions: `hi` accepts at least what any completion
    /// accepts and `lo` at most.
    hi: SigId,
    lo: SigId,
    /// Bit i set when component i admits some hole-free subtree.
    pub mask: u64,
    pub has_hole: bool,
    /// Node count with each hole counted once.
    pub size: u32,
    pub min_depth: u32,
    pub sem: u32,
}

pub(crate) struct Arena {
    table: InfixTable,
    nodes: Vec<Node>,
    index: FxHashMap<Kind, NodeId>,
    sigs: Vec<Rc<Sig>>,
    sig_index: HashMap<Rc<Sig>, SigId>,
    /// Results of signature operations already computed.
    sig_ops: FxHashMap<(SigOp, SigId, SigId), SigId>,
    sems: FxHashMap<SemKey, u32>,
    lists: Vec<Vec<Sketch>>,
    list_index: HashMap<Vec<Sketch>, u32>,
    list_nodes: Vec<Vec<NodeId>>,
    /// Distinct hole components of the sketch being completed.
    components: Vec<Sketch>,
    fills: HashMap<(u32, usize), Rc<[NodeId]>>,
    full: SigId,
    empty: SigId,
    eps: SigId,
}

impl Arena {
    pub fn new(table: InfixTable, sketch: &Sketch) -> Arena {
        let mut components: Vec<Sketch> = vec![];
        for c in sketch.hole_components() {
            if !components.contains(c) {
                components.push(c.clone());
            }
        }
        let mut arena = Arena {
            nodes: vec![],
            index: FxHashMap::default(),
            sigs: vec![],
            sig_index: HashMap::new(),
            sig_ops: FxHashMap::default(),
            sems: FxHashMap::default(),
            lists: vec![vec![]],
            list_index: HashMap::from([(vec![], 0)]),
            list_nodes: vec![vec![]],
            components,
            fills: HashMap::new(),
            full: 0,
            empty: 0,
            eps: 0,
            table,
        };
        arena.full = arena.intern_sig(arena.table.full());
        arena.empty = arena.intern_sig(arena.table.empty());
        arena.eps = arena.intern_sig(arena.table.eps());
        arena
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    /// Whether some completion of the node could be consistent.
    pub fn feasible(&self, id: NodeId) -> bool {
        let n = self.node(id);
        self.table.accepts_positives(&self.sigs[n.hi as usize])
            && self.table.rejects_negatives(&self.sigs[n.lo as usize])
    }

    fn intern_sig(&mut self, sig: Sig) -> SigId {
        if let Some(&id) = self.sig_index.get(&sig) {
            return id;
        }
        let id = self.sigs.len() as SigId;
        let sig = Rc::new(sig);
        self.sigs.push(sig.clone());
        self.sig_index.insert(sig, id);
        id
    }

    fn intern_sem(&mut self, key: SemKey) -> u32 {
        let next = self.sems.len() as u32;
        *self.sems.entry(key).or_insert(next)
    }

    fn sig(&self, id: SigId) -> &Sig {
        &self.sigs[id as usize]
    }

    fn unary_sig(&mut self, op: UnaryOp, x: SigId) -> SigId {
        let (full, empty) = (self.full, self.empty);
        match (op, x) {
            (UnaryOp::Not, x) if x == full => return empty,
            (UnaryOp::Not, x) if x == empty => return full,
            (UnaryOp::Optional, x) if x == empty => return self.eps,
            (_, x) if x == full => return full,
            (UnaryOp::StartsWith | UnaryOp::EndsWith | UnaryOp::Contains, x) if x == empty => {
                return empty
            }
            _ => {}
        }
        self.memo(SigOp::Unary(op), x, x, |a, t, x, _| match op {
            UnaryOp::StartsWith => t.starts_with(x),
            UnaryOp::EndsWith => t.ends_with(x),
            UnaryOp::Contains => t.ends_with(&t.starts_with(x)),
            UnaryOp::Not => t.not(x),
            UnaryOp::Optional => t.or(x, a.sig(a.eps)),
            UnaryOp::KleeneStar => t.star(x),
        })
    }

    fn binary_sig(&mut self, op: BinaryOp, a: SigId, b: SigId) -> SigId {
        let (full, empty) = (self.full, self.empty);
        match op {
            BinaryOp::Concat if a == empty || b == empty => return empty,
            BinaryOp::Concat if a == self.eps => return b,
            BinaryOp::Concat if b == self.eps => return a,
            BinaryOp::Concat if a == full => return self.unary_sig(UnaryOp::EndsWith, b),
            BinaryOp::Concat if b == full => return self.unary_sig(UnaryOp::StartsWith, a),
            BinaryOp::And if a == empty || b == empty => return empty,
            BinaryOp::And if a == full => return b,
            BinaryOp::And if b == full => return a,
            BinaryOp::Or if a == full || b == full => return full,
            BinaryOp::Or if a == empty => return b,
            BinaryOp::Or if b == empty => return a,
            _ => {}
        }
        self.memo(SigOp::Binary(op), a, b, |_, t, x, y| match op {
            BinaryOp::Concat => t.concat(x, y),
            BinaryOp::And => t.and(x, y),
            BinaryOp::Or => t.or(x, y),
        })
    }

    fn repeat_sig(&mut self, k: Count, x: SigId) -> SigId {
        // counts are positive, and the universal language contains the
        // empty string
        if x == self.full || x == self.empty {
            return x;
        }
        self.memo(SigOp::Repeat(k), x, x, |_, t, x, _| t.repeat(x, k))
    }

    fn memo(
        &mut self,
        op: SigOp,
        a: SigId,
        b: SigId,
        f: impl FnOnce(&Arena, &InfixTable, &Sig, &Sig) -> Sig,
    ) -> SigId {
        if let Some(&r) = self.sig_ops.get(&(op, a, b)) {
            return r;
        }
        let out = f(self, &self.table, self.sig(a), self.sig(b));
        let r = self.intern_sig(out);
        self.sig_ops.insert((op, a, b), r);
        r
    }

    fn register_list(&mut self, comps: &[Sketch]) -> u32 {
        if let Some(&id) = self.list_index.get(comps) {
            return id;
        }
        let nodes = comps.iter().map(|c| self.import(c)).collect();
        let id = self.lists.len() as u32;
        self.lists.push(comps.to_vec());
        self.list_index.insert(comps.to_vec(), id);
        self.list_nodes.push(nodes);
        id
    }

    fn mk(&mut self, kind: Kind) -> NodeId {
        if let Some(&id) = self.index.get(&kind) {
            return id;
        }
        let child = |a: &Arena, id: NodeId| {
            let n = a.node(id);
            (n.hi, n.lo, n.mask, n.has_hole, n.size, n.min_depth, n.sem)
        };
        let (hi, lo, mask, has_hole, size, min_depth, sem_key) = match kind {
            Kind::Hole(list) => {
                let min_depth = self.list_nodes[list as usize]
                    .iter()
                    .map(|&c| self.node(c).min_depth)
                    .min()
                    .unwrap_or(1);
                (self.full, self.empty, 0, true, 1, min_depth, SemKey::Hole(list))
            }
            Kind::Class(c) => {
                let sig = match c {
                    CharClass::Eps => self.eps,
                    CharClass::Null => self.empty,
                    c => {
                        let s = self.table.chars(c.chars());
                        self.intern_sig(s)
                    }
                };
                (sig, sig, 0, false, 1, 1, SemKey::Sig(sig))
            }
            Kind::Lit(c) => {
                let s = self.table.chars(CharSet::singleton(c));
                let sig = self.intern_sig(s);
                (sig, sig, 0, false, 1, 1, SemKey::Sig(sig))
            }
            Kind::Unary(op, x) => {
                let (xhi, xlo, m, h, sz, d, xs) = child(self, x);
                let (hi, lo) = if !h {
                    let s = self.unary_sig(op, xhi);
                    (s, s)
                } else if op == UnaryOp::Not {
                    (self.unary_sig(op, xlo), self.unary_sig(op, xhi))
                } else {
                    (self.unary_sig(op, xhi), self.unary_sig(op, xlo))
                };
                (hi, lo, m, h, sz + 1, d + 1, SemKey::Unary(op, xs))
            }
            Kind::Binary(op, a, b) => {
                let (ahi, alo, ma, ha, sa, da, sema) = child(self, a);
                let (bhi, blo, mb, hb, sb, db, semb) = child(self, b);
                let hi = self.binary_sig(op, ahi, bhi);
                let lo = if ha || hb { self.binary_sig(op, alo, blo) } else { hi };
                let sem = SemKey::Binary(op, sema, semb);
                (hi, lo, ma | mb, ha || hb, sa + sb + 1, da.max(db) + 1, sem)
            }
            Kind::Repeat(k, x) => {
                let (xhi, xlo, m, h, sz, d, xs) = child(self, x);
                let hi = self.repeat_sig(k, xhi);
                let lo = if h { self.repeat_sig(k, xlo) } else { hi };
                (hi, lo, m, h, sz + 1, d + 1, SemKey::Repeat(k, xs))
            }
        };
        let sem_key = if has_hole { sem_key } else { SemKey::Sig(hi) };
        let sem = self.intern_sem(sem_key);
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            kind,
            hi,
            lo,
            mask,
            has_hole,
            size,
            min_depth,
            sem,
        });
        self.index.insert(kind, id);
        if !has_hole && !self.components.is_empty() {
            let r = self.export(id).to_regex().expect("hole-free");
            let own = self
                .components
                .iter()
                .take(64)
                .enumerate()
                .filter(|(_, c)| sketch_matches(c, &r))
                .fold(0u64, |m, (i, _)| m | 1 << i);
            self.nodes[id as usize].mask |= own;
        }
        id
    }

    pub fn import(&mut self, s: &Sketch) -> NodeId {
        let kind = match s {
            Sketch::Hole(cs) => Kind::Hole(self.register_list(cs)),
            Sketch::Class(c) => Kind::Class(*c),
            Sketch::Lit(c) => Kind::Lit(*c),
            Sketch::Unary(op, x) => Kind::Unary(*op, self.import(x)),
            Sketch::Binary(op, a, b) => {
                let a = self.import(a);
                Kind::Binary(*op, a, self.import(b))
            }
            Sketch::Repeat(x, k) => Kind::Repeat(*k, self.import(x)),
        };
        self.mk(kind)
    }

    pub fn export(&self, id: NodeId) -> Sketch {
        match self.node(id).kind {
            Kind::Hole(l) => Sketch::Hole(self.lists[l as usize].clone()),
            Kind::Class(c) => Sketch::Class(c),
            Kind::Lit(c) => Sketch::Lit(c),
            Kind::Unary(op, x) => Sketch::unary(op, self.export(x)),
            Kind::Binary(op, a, b) => Sketch::binary(op, self.export(a), self.export(b)),
            Kind::Repeat(k, x) => Sketch::repeat(self.export(x), k),
        }
    }

    /// Replacements for a hole with component list `list` where the
    /// replacement may be at most `budget` deep.
    fn fills_for(&mut self, list: u32, budget: usize, space: &Space) -> Rc<[NodeId]> {
        let budget = budget.min(2);
        if let Some(f) = self.fills.get(&(list, budget)) {
            return f.clone();
        }
        let comps = self.lists[list as usize].clone();
        let mut out: Vec<NodeId> = vec![];
        if budget >= 1 {
            out.extend(self.list_nodes[list as usize].iter().copied());
            for t in &space.terminals {
                if comps.is_empty() || comps.iter().any(|c| sketch_matches(c, t)) {
                    out.push(self.import(&t.to_sketch()));
                }
            }
        }
        if budget >= 2 {
            let free = self.mk(Kind::Hole(0));
            let held = self.mk(Kind::Hole(list));
            for &t in &space.templates {
                let shapes: Vec<Kind> = match t {
                    Template::Unary(op) => vec![Kind::Unary(op, held)],
                    Template::Repeat(k) => vec![Kind::Repeat(k, held)],
                    Template::Binary(op) if list == 0 => vec![Kind::Binary(op, free, free)],
                    Template::Binary(op) => {
                        vec![Kind::Binary(op, held, free), Kind::Binary(op, free, held)]
                    }
                };
                for k in shapes {
                    out.push(self.mk(k));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|id| seen.insert(*id));
        let out: Rc<[NodeId]> = out.into();
        self.fills.insert((list, budget), out.clone());
        out
    }

    /// Children of `root` obtained by filling its leftmost-outermost hole,
    /// keeping only those whose completions can stay within the depth bound.
    pub fn expand(&mut self, root: NodeId, space: &Space) -> Vec<NodeId> {
        let mut path: Vec<(Kind, usize)> = vec![];
        let mut cur = root;
        let list = loop {
            let kind = self.node(cur).kind;
            let next = match kind {
                Kind::Hole(l) => break Some(l),
                Kind::Class(_) | Kind::Lit(_) => break None,
                Kind::Unary(_, x) | Kind::Repeat(_, x) => (x, 0),
                Kind::Binary(_, a, b) => {
                    if self.node(a).has_hole {
                        (a, 0)
                    } else {
                        (b, 1)
                    }
                }
            };
            path.push((kind, next.1));
            cur = next.0;
        };
        let Some(list) = list else {
            return vec![];
        };
        let depth = path.len() + 1;
        if depth > space.depth_bound {
            return vec![];
        }
        let budget = space.depth_bound + 1 - depth;
        let fills = self.fills_for(list, budget, space);
        let mut out = vec![];
        for &fill in fills.iter() {
            if self.node(fill).min_depth as usize > budget {
                continue;
            }
            let mut new = fill;
            for &(kind, slot) in path.iter().rev() {
                let k = match kind {
                    Kind::Unary(op, _) => Kind::Unary(op, new),
                    Kind::Repeat(c, _) => Kind::Repeat(c, new),
                    Kind::Binary(op, a, b) => {
                        if slot == 0 {
                            Kind::Binary(op, new, b)
                        } else {
                            Kind::Binary(op, a, new)
                        }
                    }
                    _ => unreachable!("holes and leaves have no children"),
                };
                new = self.mk(k);
            }
            out.push(new);
        }
        out
    }

    /// The node as a concrete regex, if it has no holes.
    pub fn regex(&self, id: NodeId) -> Option<Regex> {
        self.export(id).to_regex()
    }
}
