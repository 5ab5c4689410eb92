//! Searching for consistent systems of components on the 0-skeleton of
//! `K_n(G)`, with checkable refutations.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{one_skeleton, realize_vertex, ComplexError, Face, Skeleton};
use crate::geometry::{complement_components, Component, Point};
use crate::graph::{EdgeId, End, Graph, VertexId};
use crate::rational::{half, q, Q};
use crate::transitions::{skeleton_edge_relation, Direction, TransitionTable};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Enforce that every witness of a distinguished pair agrees.
    pub pairs: bool,
    /// Randomizes value order and tie-breaks when set.
    pub seed: Option<u64>,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { pairs: false, seed: None, budget: DEFAULT_BUDGET }
    }
}

/// All 0-faces where tokens `first` then `second` are adjacent on the closed
/// positive edge `edge`, with the index of the component between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessClass {
    pub edge: EdgeId,
    pub first: usize,
    pub second: usize,
    pub members: Vec<(usize, usize)>,
}

/// Tokens met walking along the closed edge, with their parameters. A token on
/// the vertex of a loop is met at both ends.
fn closed_edge_sequence(g: &Graph, f: &Face, e: EdgeId) -> Vec<(usize, Q)> {
    let mut seq = Vec::new();
    let tuple = &f.edges[e.0];
    let l = tuple.len() as i128;
    if let Some(t) = f.vertices[g.endpoint(e, End::Tail).0] {
        seq.push((t, q(0, 1)));
    }
    for (j, &t) in tuple.iter().enumerate() {
        seq.push((t, q(j as i128 + 1, l + 1)));
    }
    if let Some(t) = f.vertices[g.endpoint(e, End::Head).0] {
        seq.push((t, q(1, 1)));
    }
    seq
}

pub fn witness_classes(g: &Graph, sk: &Skeleton, table: &TransitionTable) -> Vec<WitnessClass> {
    let mut index: BTreeMap<(EdgeId, usize, usize), usize> = BTreeMap::new();
    let mut classes: Vec<WitnessClass> = Vec::new();
    let cycle_edges: Vec<EdgeId> = g.edge_ids().filter(|&e| !g.is_bridge(e)).collect();
    for (node, f) in sk.nodes.iter().enumerate() {
        for &e in &cycle_edges {
            for w in closed_edge_sequence(g, f, e).windows(2) {
                let ((a, pa), (b, pb)) = (w[0], w[1]);
                if a == b {
                    continue;
                }
                let comp = table.complements[node]
                    .component_of(&Point::Edge(e, (pa + pb) * half()))
                    .expect("gap between adjacent tokens is free");
                let k = *index.entry((e, a, b)).or_insert_with(|| {
                    classes.push(WitnessClass { edge: e, first: a, second: b, members: Vec::new() });
                    classes.len() - 1
                });
                classes[k].members.push((node, comp));
            }
        }
    }
    classes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    /// No support across this skeleton edge.
    Edge(usize),
    /// The class is known to hold because `witness` is pinned to its gap.
    PairForce { class: usize, witness: usize },
    /// The class is known to fail because `witness` cannot take its gap.
    PairExclude { class: usize, witness: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Decide { face: usize, value: usize },
    Prune { face: usize, value: usize, reason: Reason },
    /// `face` has an empty domain: undo back to the latest decision and rule
    /// out its value.
    Conflict { face: usize },
}

/// One component per 0-face, indexed like the skeleton's nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<Component>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Labeling),
    Unsat(Vec<TraceEvent>),
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flag {
    /// Sat only shows the local conditions can be met, and theory says no
    /// section exists or cannot decide.
    NecessaryConditionOnly,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::NecessaryConditionOnly => "necessary-condition-only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub flags: Vec<Flag>,
    pub steps: u64,
}

/// Everything the propagator and the checkers need for one `(G, n)`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub skeleton: Skeleton,
    pub table: TransitionTable,
    pub classes: Vec<WitnessClass>,
}

impl Instance {
    pub fn build(g: &Graph, n: usize, pairs: bool) -> Result<Instance, ComplexError> {
        let skeleton = one_skeleton(g, n)?;
        let table = TransitionTable::build(g, &skeleton);
        let classes = if pairs { witness_classes(g, &skeleton, &table) } else { Vec::new() };
        for c in &table.complements {
            assert!(c.len() <= 64, "too many components for a bitmask domain");
        }
        Ok(Instance { n, skeleton, table, classes })
    }

    fn full_domains(&self) -> Vec<u64> {
        self.table
            .complements
            .iter()
            .map(|c| if c.len() == 64 { u64::MAX } else { (1u64 << c.len()) - 1 })
            .collect()
    }

    fn class_incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.skeleton.nodes.len()];
        for (k, c) in self.classes.iter().enumerate() {
            for &(node, _) in &c.members {
                inc[node].push(k);
            }
        }
        inc
    }

    /// Groups of nodes linked by skeleton edges or shared classes.
    fn subproblems(&self) -> Vec<Vec<usize>> {
        let nn = self.skeleton.nodes.len();
        let mut uf = crate::unionfind::UnionFind::new(nn);
        for e in &self.skeleton.edges {
            uf.union(e.minus, e.plus);
        }
        for c in &self.classes {
            for w in c.members.windows(2) {
                uf.union(w[0].0, w[1].0);
            }
        }
        let (labels, k) = uf.labels();
        let mut groups = vec![Vec::new(); k];
        for (node, l) in labels.into_iter().enumerate() {
            groups[l].push(node);
        }
        groups
    }
}

fn row_masks(rows: &[Vec<usize>]) -> Vec<u64> {
    rows.iter().map(|r| r.iter().fold(0u64, |m, &y| m | (1 << y))).collect()
}

struct Propagator<'a> {
    inst: &'a Instance,
    masks: Vec<Vec<u64>>,
    incidence: Vec<Vec<usize>>,
    class_inc: Vec<Vec<usize>>,
    domains: Vec<u64>,
    trace: Vec<TraceEvent>,
    steps: u64,
    budget: u64,
}

enum Stop {
    Conflict(usize),
    Budget,
}

impl<'a> Propagator<'a> {
    fn new(inst: &'a Instance, budget: u64) -> Self {
        Propagator {
            inst,
            masks: inst.table.forward.iter().map(|r| row_masks(r)).collect(),
            incidence: inst.skeleton.incidence(),
            class_inc: inst.class_incidence(),
            domains: inst.full_domains(),
            trace: Vec::new(),
            steps: 0,
            budget,
        }
    }

    fn prune(&mut self, face: usize, keep: u64, reason: Reason, queue: &mut VecDeque<usize>) -> Result<(), Stop> {
        let removed = self.domains[face] & !keep;
        if removed == 0 {
            return Ok(());
        }
        for v in 0..64 {
            if removed >> v & 1 == 1 {
                self.trace.push(TraceEvent::Prune { face, value: v, reason });
            }
        }
        self.steps += removed.count_ones() as u64;
        self.domains[face] &= keep;
        queue.push_back(face);
        if self.domains[face] == 0 {
            return Err(Stop::Conflict(face));
        }
        if self.steps > self.budget {
            return Err(Stop::Budget);
        }
        Ok(())
    }

    fn revise_edge(&mut self, i: usize, queue: &mut VecDeque<usize>) -> Result<(), Stop> {
        let se = &self.inst.skeleton.edges[i];
        let (m, p) = (se.minus, se.plus);
        let rows = &self.masks[i];
        let dm = self.domains[m];
        let support: u64 = (0..rows.len()).filter(|&x| dm >> x & 1 == 1).fold(0, |acc, x| acc | rows[x]);
        self.prune(p, support, Reason::Edge(i), queue)?;
        let dp = self.domains[p];
        let rows = &self.masks[i];
        let keep: u64 = (0..rows.len()).filter(|&x| rows[x] & dp != 0).fold(0, |acc, x| acc | 1 << x);
        self.prune(m, keep, Reason::Edge(i), queue)
    }

    fn revise_class(&mut self, k: usize, queue: &mut VecDeque<usize>) -> Result<(), Stop> {
        let members = &self.inst.classes[k].members;
        let forced = members.iter().find(|&&(u, c)| self.domains[u] == 1 << c).map(|&(u, _)| u);
        if let Some(witness) = forced {
            for &(u, c) in members {
                self.prune(u, 1 << c, Reason::PairForce { class: k, witness }, queue)?;
            }
            return Ok(());
        }
        let excluded = members.iter().find(|&&(u, c)| self.domains[u] >> c & 1 == 0).map(|&(u, _)| u);
        if let Some(witness) = excluded {
            for &(u, c) in members {
                self.prune(u, !(1 << c), Reason::PairExclude { class: k, witness }, queue)?;
            }
        }
        Ok(())
    }

    fn propagate(&mut self, mut queue: VecDeque<usize>) -> Result<(), Stop> {
        while let Some(u) = queue.pop_front() {
            for j in 0..self.incidence[u].len() {
                let i = self.incidence[u][j];
                self.revise_edge(i, &mut queue)?;
            }
            for j in 0..self.class_inc[u].len() {
                let k = self.class_inc[u][j];
                self.revise_class(k, &mut queue)?;
            }
        }
        Ok(())
    }
}

enum Outcome {
    Sat,
    Unsat,
    Budget,
}

/// Depth-first search over one group of nodes, leaving the solution in
/// `p.domains` on success.
fn solve_group(p: &mut Propagator, group: &[usize], rng: &mut Option<ChaCha8Rng>) -> Outcome {
    let mut stack: Vec<(Vec<u64>, usize, usize)> = Vec::new();
    let mut pending: Result<(), Stop> = p.propagate(group.iter().copied().collect());
    loop {
        match pending {
            Err(Stop::Budget) => return Outcome::Budget,
            Err(Stop::Conflict(face)) => {
                p.trace.push(TraceEvent::Conflict { face });
                let Some((saved, f, v)) = stack.pop() else {
                    return Outcome::Unsat;
                };
                p.domains = saved;
                p.domains[f] &= !(1 << v);
                p.steps += 1;
                pending = if p.domains[f] == 0 {
                    Err(Stop::Conflict(f))
                } else {
                    p.propagate(VecDeque::from([f]))
                };
                continue;
            }
            Ok(()) => {}
        }
        let open: Vec<usize> = group.iter().copied().filter(|&u| p.domains[u].count_ones() > 1).collect();
        let Some(best) = open.iter().map(|&u| p.domains[u].count_ones()).min() else {
            return Outcome::Sat;
        };
        let mut ties: Vec<usize> = open.into_iter().filter(|&u| p.domains[u].count_ones() == best).collect();
        let mut values: Vec<usize> = Vec::new();
        if let Some(r) = rng.as_mut() {
            ties.shuffle(r);
        }
        let face = ties[0];
        for v in 0..64 {
            if p.domains[face] >> v & 1 == 1 {
                values.push(v);
            }
        }
        if let Some(r) = rng.as_mut() {
            values.shuffle(r);
        }
        let value = values[0];
        stack.push((p.domains.clone(), face, value));
        p.trace.push(TraceEvent::Decide { face, value });
        p.steps += 1;
        if p.steps > p.budget {
            return Outcome::Budget;
        }
        p.domains[face] = 1 << value;
        pending = p.propagate(VecDeque::from([face]));
    }
}

/// Whether theory rules a section out or leaves it open.
fn needs_flag(g: &Graph, n: usize) -> bool {
    !matches!(predict(g, n), Prediction::Exists(_))
}

pub fn search_instance(g: &Graph, inst: &Instance, options: &SearchOptions) -> Certificate {
    let mut p = Propagator::new(inst, options.budget);
    let mut rng = options.seed.map(ChaCha8Rng::seed_from_u64);
    let mut inconclusive = false;
    for group in inst.subproblems() {
        let before = p.trace.len();
        match solve_group(&mut p, &group, &mut rng) {
            Outcome::Sat => p.trace.truncate(before),
            Outcome::Unsat => {
                let trace = p.trace.split_off(before);
                return Certificate { verdict: Verdict::Unsat(trace), flags: Vec::new(), steps: p.steps };
            }
            Outcome::Budget => {
                inconclusive = true;
                break;
            }
        }
    }
    if inconclusive {
        return Certificate { verdict: Verdict::Inconclusive, flags: Vec::new(), steps: p.steps };
    }
    let labels = p
        .domains
        .iter()
        .enumerate()
        .map(|(u, d)| inst.table.complements[u].components[d.trailing_zeros() as usize].clone())
        .collect();
    let flags = if needs_flag(g, inst.n) { vec![Flag::NecessaryConditionOnly] } else { Vec::new() };
    Certificate { verdict: Verdict::Sat(Labeling { labels }), flags, steps: p.steps }
}

pub fn search_consistent(g: &Graph, n: usize, options: &SearchOptions) -> Result<Certificate, ComplexError> {
    let inst = Instance::build(g, n, options.pairs)?;
    Ok(search_instance(g, &inst, options))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("step {0}: pruning is not justified")]
    Unjustified(usize),
    #[error("step {0}: conflict on a non-empty domain")]
    FalseConflict(usize),
    #[error("step {0}: decision on a value outside the domain")]
    BadDecision(usize),
    #[error("step {0}: reference out of range")]
    OutOfRange(usize),
    #[error("trace does not end in a conflict with no open decisions")]
    Incomplete,
}

/// Replays an Unsat trace from full domains, checking each step on its own.
pub fn replay_trace(inst: &Instance, trace: &[TraceEvent]) -> Result<(), ReplayError> {
    let mut dom = inst.full_domains();
    let mut stack: Vec<(Vec<u64>, usize, usize)> = Vec::new();
    let nn = dom.len();
    let has = |d: &[u64], u: usize, v: usize| v < 64 && d[u] >> v & 1 == 1;
    for (step, ev) in trace.iter().enumerate() {
        match *ev {
            TraceEvent::Decide { face, value } => {
                if face >= nn || !has(&dom, face, value) {
                    return Err(ReplayError::BadDecision(step));
                }
                stack.push((dom.clone(), face, value));
                dom[face] = 1 << value;
            }
            TraceEvent::Prune { face, value, reason } => {
                if face >= nn || !has(&dom, face, value) {
                    return Err(ReplayError::OutOfRange(step));
                }
                let ok = match reason {
                    Reason::Edge(i) => {
                        let Some(se) = inst.skeleton.edges.get(i) else {
                            return Err(ReplayError::OutOfRange(step));
                        };
                        let rows = &inst.table.forward[i];
                        if face == se.plus {
                            !(0..rows.len()).any(|x| has(&dom, se.minus, x) && rows[x].contains(&value))
                        } else if face == se.minus {
                            !rows[value].iter().any(|&y| has(&dom, se.plus, y))
                        } else {
                            false
                        }
                    }
                    Reason::PairForce { class, witness } | Reason::PairExclude { class, witness } => {
                        let Some(c) = inst.classes.get(class) else {
                            return Err(ReplayError::OutOfRange(step));
                        };
                        let gap = |u: usize| c.members.iter().find(|m| m.0 == u).map(|m| m.1);
                        match (gap(face), gap(witness)) {
                            (Some(fg), Some(wg)) => match reason {
                                Reason::PairForce { .. } => dom[witness] == 1 << wg && value != fg,
                                _ => !has(&dom, witness, wg) && value == fg,
                            },
                            _ => false,
                        }
                    }
                };
                if !ok {
                    return Err(ReplayError::Unjustified(step));
                }
                dom[face] &= !(1 << value);
            }
            TraceEvent::Conflict { face } => {
                if face >= nn || dom[face] != 0 {
                    return Err(ReplayError::FalseConflict(step));
                }
                match stack.pop() {
                    Some((saved, f, v)) => {
                        dom = saved;
                        dom[f] &= !(1 << v);
                    }
                    None => {
                        return if step + 1 == trace.len() { Ok(()) } else { Err(ReplayError::Incomplete) };
                    }
                }
            }
        }
    }
    Err(ReplayError::Incomplete)
}

/// Re-derives every skeleton edge relation and checks each label against it.
/// Shares nothing with the propagator beyond the relation calculus.
pub fn validate_labeling(g: &Graph, sk: &Skeleton, l: &Labeling) -> bool {
    if l.labels.len() != sk.nodes.len() {
        return false;
    }
    for (u, f) in sk.nodes.iter().enumerate() {
        let Ok(x) = realize_vertex(f) else { return false };
        if !complement_components(g, &x).components.contains(&l.labels[u]) {
            return false;
        }
    }
    (0..sk.edges.len()).all(|i| {
        let se = &sk.edges[i];
        let rel = skeleton_edge_relation(g, sk, i, Direction::IntoVertex);
        let Some(x) = rel.source.index_of(&l.labels[se.minus]) else { return false };
        rel.target.index_of(&l.labels[se.plus]).map_or(false, |y| rel.rows[x].contains(&y))
    })
}

/// An ordered token pair on a positive edge: `first` comes before `second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DistinguishedPair {
    pub first: usize,
    pub second: usize,
    pub edge: EdgeId,
}

/// The token (or occupied vertex's token) at parameter `t` of edge `e`.
fn token_at_param(g: &Graph, x: &crate::geometry::Configuration, e: EdgeId, t: Q) -> Option<usize> {
    if t == q(0, 1) {
        x.occupies(g.endpoint(e, End::Tail))
    } else if t == q(1, 1) {
        x.occupies(g.endpoint(e, End::Head))
    } else {
        x.token_at(&Point::Edge(e, t))
    }
}

/// Pairs read off labels that are gaps between two tokens of a cycle edge.
pub fn extract_distinguished_pairs(g: &Graph, sk: &Skeleton, l: &Labeling) -> BTreeSet<DistinguishedPair> {
    let mut out = BTreeSet::new();
    for (u, f) in sk.nodes.iter().enumerate() {
        let c = &l.labels[u];
        if !c.is_interval() || g.is_bridge(c.pieces[0].edge) {
            continue;
        }
        let pc = &c.pieces[0];
        let x = realize_vertex(f).expect("node");
        if let (Some(a), Some(b)) = (token_at_param(g, &x, pc.edge, pc.lo), token_at_param(g, &x, pc.edge, pc.hi)) {
            if a != b {
                out.insert(DistinguishedPair { first: a, second: b, edge: pc.edge });
            }
        }
    }
    out
}

/// False when two pairs share no token, or when `(i, j)` and `(k, i)` sit on
/// one edge with `j != k`.
pub fn pair_constraints(pairs: &BTreeSet<DistinguishedPair>) -> bool {
    let ps: Vec<&DistinguishedPair> = pairs.iter().collect();
    for a in &ps {
        for b in &ps {
            let share = a.first == b.first || a.first == b.second || a.second == b.first || a.second == b.second;
            if !share {
                return false;
            }
            if a.edge == b.edge && b.second == a.first && a.second != b.first {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prediction {
    Exists(&'static str),
    NotExists(&'static str),
    Unknown(&'static str),
}

/// Components of `G \ {w}` each met by at least two edge-ends at `w`.
pub fn doubly_attached_components(g: &Graph, w: VertexId) -> usize {
    let x = crate::geometry::Configuration(vec![Point::Vertex(w)]);
    let comps = complement_components(g, &x);
    let mut hits = vec![0usize; comps.len()];
    for &(e, end) in g.ends_at(w) {
        let t = if end == End::Tail { q(1, 4) } else { q(3, 4) };
        hits[comps.component_of(&Point::Edge(e, t)).expect("free")] += 1;
    }
    hits.into_iter().filter(|&h| h >= 2).count()
}

pub fn predict(g: &Graph, n: usize) -> Prediction {
    let chi = g.euler_characteristic();
    if chi == 1 {
        return if n >= 2 {
            Prediction::Exists("trees admit sections for n >= 2")
        } else {
            Prediction::NotExists("a single point separates a tree")
        };
    }
    if chi == 0 {
        return Prediction::Exists("one cycle: flow along the circle");
    }
    if n == 1 {
        return Prediction::Exists("n = 1: antipode on a circle through a retraction");
    }
    if n as i64 >= 2 - chi {
        return Prediction::NotExists("n >= 2 - chi with chi < 0");
    }
    if g.vertices().any(|w| doubly_attached_components(g, w) >= n) {
        return Prediction::Exists("a vertex with at least n doubly attached components");
    }
    Prediction::Unknown("run the search on the core graph")
}

/// Randomized restarts; returns a labeling if any restart finds one.
pub fn restarts(g: &Graph, inst: &Instance, base: &SearchOptions, count: u64) -> Option<Labeling> {
    (0..count).find_map(|s| {
        let opts = SearchOptions { seed: Some(s.wrapping_mul(0x9e37_79b9).wrapping_add(1)), ..base.clone() };
        match search_instance(g, inst, &opts).verdict {
            Verdict::Sat(l) => Some(l),
            _ => None,
        }
    })
}

pub fn verdict_name(v: &Verdict) -> String {
    String::from(match v {
        Verdict::Sat(_) => "sat",
        Verdict::Unsat(_) => "unsat",
        Verdict::Inconclusive => "inconclusive",
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChaseOutcome {
    Pair(DistinguishedPair),
    /// The token ran into a free vertex, where no component survives.
    DeadEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChaseError {
    #[error("the component together with the token's position contains a cycle or does not touch it")]
    NotSimplyConnected,
    #[error("token index out of range")]
    NoSuchToken,
}

/// Moves token `i` into `x_comp` until the target component is a gap between
/// two tokens, following every branch the transition rows allow.
pub fn chase(
    g: &Graph,
    x: &crate::geometry::Configuration,
    i: usize,
    x_comp: &Component,
) -> Result<BTreeSet<ChaseOutcome>, ChaseError> {
    let pos = x.points().get(i).ok_or(ChaseError::NoSuchToken)?;
    if !x_comp.is_simply_connected(g, Some(pos)).unwrap_or(false) {
        return Err(ChaseError::NotSimplyConnected);
    }
    let mut out = BTreeSet::new();
    chase_step(g, x, i, x_comp, &mut out);
    Ok(out)
}

fn chase_step(
    g: &Graph,
    x: &crate::geometry::Configuration,
    i: usize,
    x_comp: &Component,
    out: &mut BTreeSet<ChaseOutcome>,
) {
    use crate::complex::OrientedEdge;
    use crate::transitions::{type1_transition, type2_transition, TokenPath, TypeOneMove, TypeTwoMove};

    if x_comp.is_interval() {
        let pc = &x_comp.pieces[0];
        if let (Some(a), Some(b)) = (token_at_param(g, x, pc.edge, pc.lo), token_at_param(g, x, pc.edge, pc.hi)) {
            out.insert(ChaseOutcome::Pair(DistinguishedPair { first: a, second: b, edge: pc.edge }));
        }
        return;
    }
    // the single edge of the closure of X at token i, oriented away from it
    let (start, along) = match &x.points()[i] {
        Point::Edge(e, s) => {
            let up = x_comp.contains(&Point::Edge(*e, (*s + q(1, 1)) * half()))
                || x_comp.pieces.iter().any(|p| p.edge == *e && p.lo == *s);
            let oe = if up { OrientedEdge::positive(*e) } else { OrientedEdge::negative(*e) };
            (x.clone(), oe)
        }
        Point::Vertex(v0) => {
            let &(e, end) = g
                .ends_at(*v0)
                .iter()
                .find(|&&(e, end)| x_comp.pieces.iter().any(|p| p.edge == e && if end == End::Tail { p.lo == q(0, 1) } else { p.hi == q(1, 1) }))
                .expect("token borders X");
            let mut pts = x.0.clone();
            pts[i] = Point::Edge(e, half());
            let mut paths = vec![TokenPath::Fixed; x.len()];
            paths[i] = TokenPath::Leave { edge: e, end };
            let m = TypeOneMove { source: x.clone(), target: crate::geometry::Configuration(pts), paths };
            let oe = crate::complex::OrientedEdge { edge: e, toward: end.opposite() };
            let _ = type1_transition(g, &m).expect("leaving a vertex");
            (m.target, oe)
        }
    };
    let here = complement_components(g, &start);
    let Ok(xi) = here.component_of(&x_comp.representative()) else { return };
    let step = TypeTwoMove { source: start.clone(), mover: i, along };
    let Ok(rel) = type2_transition(g, &step) else { return };
    let next_cfg = step.target(g);
    if rel.rows[xi].is_empty() {
        out.insert(ChaseOutcome::DeadEnd);
    }
    for &y in &rel.rows[xi] {
        chase_step(g, &next_cfg, i, &rel.target.components[y], out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::Configuration;

    fn sat(c: &Certificate) -> &Labeling {
        match &c.verdict {
            Verdict::Sat(l) => l,
            v => panic!("expected sat, got {}", verdict_name(v)),
        }
    }

    #[test]
    fn star_one_token_is_sat_but_flagged() {
        let g = catalog::star(3);
        let c = search_consistent(&g, 1, &SearchOptions::default()).unwrap();
        let sk = one_skeleton(&g, 1).unwrap();
        assert!(validate_labeling(&g, &sk, sat(&c)));
        assert_eq!(c.flags, vec![Flag::NecessaryConditionOnly]);
    }

    #[test]
    fn interval_two_tokens_trivially_sat() {
        let g = catalog::interval();
        let c = search_consistent(&g, 2, &SearchOptions::default()).unwrap();
        assert_eq!(sat(&c).labels.len(), 2);
    }

    #[test]
    fn theta_three_is_refuted_and_replays() {
        let g = catalog::theta();
        for pairs in [false, true] {
            let inst = Instance::build(&g, 3, pairs).unwrap();
            let c = search_instance(&g, &inst, &SearchOptions { pairs, ..Default::default() });
            let Verdict::Unsat(trace) = &c.verdict else { panic!("expected unsat") };
            assert_eq!(replay_trace(&inst, trace), Ok(()));
            let mut bad = trace.clone();
            bad.pop();
            assert!(replay_trace(&inst, &bad).is_err());
        }
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let g = catalog::infinity();
        let inst = Instance::build(&g, 3, false).unwrap();
        let Verdict::Unsat(mut trace) = search_instance(&g, &inst, &SearchOptions::default()).verdict else {
            panic!()
        };
        let k = trace.iter().position(|e| matches!(e, TraceEvent::Prune { .. })).unwrap();
        if let TraceEvent::Prune { face, value, .. } = trace[k] {
            trace[k] = TraceEvent::Prune { face, value, reason: Reason::Edge(usize::MAX) };
        }
        assert!(replay_trace(&inst, &trace).is_err());
    }

    #[test]
    fn swapped_label_fails_validation() {
        let g = catalog::star(3);
        let sk = one_skeleton(&g, 1).unwrap();
        let mut l = sat(&search_consistent(&g, 1, &SearchOptions::default()).unwrap()).clone();
        assert!(validate_labeling(&g, &sk, &l));
        let (u, other) = sk
            .nodes
            .iter()
            .enumerate()
            .find_map(|(u, f)| {
                let comps = complement_components(&g, &realize_vertex(f).unwrap());
                comps.components.into_iter().find(|c| *c != l.labels[u]).map(|c| (u, c))
            })
            .unwrap();
        l.labels[u] = other;
        assert!(!validate_labeling(&g, &sk, &l));
        let empty = one_skeleton(&catalog::interval(), 1).unwrap();
        assert_eq!(empty.edges.len(), 0);
    }

    #[test]
    fn deterministic_certificates() {
        let g = catalog::dumbbell();
        let o = SearchOptions { seed: Some(7), ..Default::default() };
        assert_eq!(search_consistent(&g, 2, &o).unwrap(), search_consistent(&g, 2, &o).unwrap());
    }

    #[test]
    fn pair_rules() {
        let e = EdgeId(0);
        let p = |a, b| DistinguishedPair { first: a, second: b, edge: e };
        assert!(!pair_constraints(&[p(0, 1), p(2, 3)].into_iter().collect()));
        assert!(pair_constraints(&[p(0, 1), p(0, 2), p(0, 3)].into_iter().collect()));
        assert!(!pair_constraints(&[p(1, 2), p(2, 0)].into_iter().collect()));
    }

    #[test]
    fn predictions() {
        assert!(matches!(predict(&catalog::star(3), 1), Prediction::NotExists(_)));
        assert!(matches!(predict(&catalog::star(3), 2), Prediction::Exists(_)));
        assert!(matches!(predict(&catalog::theta(), 3), Prediction::NotExists(_)));
        assert!(matches!(predict(&catalog::theta(), 2), Prediction::Unknown(_)));
        assert!(matches!(predict(&catalog::wedge_of_circles(3), 3), Prediction::Exists(_)));
        assert!(matches!(predict(&catalog::circle(), 5), Prediction::Exists(_)));
        assert!(matches!(predict(&catalog::infinity(), 1), Prediction::Exists(_)));
    }

    #[test]
    fn labels_yield_pairs() {
        let g = catalog::theta();
        let sk = one_skeleton(&g, 3).unwrap();
        let l = Labeling {
            labels: sk
                .nodes
                .iter()
                .map(|f| {
                    let x = realize_vertex(f).unwrap();
                    let comps = complement_components(&g, &x);
                    comps.components.iter().find(|c| c.is_interval()).cloned().unwrap_or(comps.components[0].clone())
                })
                .collect(),
        };
        let pairs = extract_distinguished_pairs(&g, &sk, &l);
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|p| p.first != p.second));
    }

    #[test]
    fn chase_base_and_branching() {
        let g = catalog::interval();
        let e = EdgeId(0);
        let x = Configuration(vec![Point::Edge(e, q(1, 4)), Point::Edge(e, q(3, 4))]);
        let comps = complement_components(&g, &x);
        let mid = comps.components[comps.component_of(&Point::Edge(e, half())).unwrap()].clone();
        let got = chase(&g, &x, 0, &mid).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![ChaseOutcome::Pair(DistinguishedPair { first: 0, second: 1, edge: e })]);

        // star: token 0 on e1, token 1 on e2; X holds the center and e3
        let s = catalog::star(3);
        let (e1, e2) = (s.edge_by_name("e1").unwrap(), s.edge_by_name("e2").unwrap());
        let x = Configuration(vec![Point::Edge(e1, half()), Point::Edge(e2, half())]);
        let comps = complement_components(&s, &x);
        let big = comps.components[comps.component_of(&Point::Vertex(VertexId(0))).unwrap()].clone();
        let got = chase(&s, &x, 0, &big).unwrap();
        assert!(got.contains(&ChaseOutcome::Pair(DistinguishedPair { first: 0, second: 1, edge: e2 })));
        assert!(got.contains(&ChaseOutcome::DeadEnd));

        let t = catalog::theta();
        let x = Configuration(vec![Point::Edge(EdgeId(0), half())]);
        let c = complement_components(&t, &x).components[0].clone();
        assert_eq!(chase(&t, &x, 0, &c), Err(ChaseError::NotSimplyConnected));
    }
}
