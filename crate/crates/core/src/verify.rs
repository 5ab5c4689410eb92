//! Randomized checks: identifying property, continuity envelope, transition
//! tables against a direct simulation, and a flood-fill component oracle.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::{walk_toward, EvalError, IdentifyingFunction, Method};
use crate::complex::{one_skeleton, realize_vertex, ComplexError, OrientedEdge};
use crate::geometry::{complement_components, shortest_distance, Configuration, Point};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::rational::{self, int, q, zero, Q};
use crate::transitions::TransitionTable;

/// Random points use parameters on the grid `k / 2^24`.
pub const GRANULARITY_BITS: u32 = 24;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub paths: usize,
    pub steps: usize,
    pub walks: usize,
    pub walk_length: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 10_000, paths: 500, steps: 32, walks: 50, walk_length: 20, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    /// `f(x)` equals the position of this token.
    Collision(usize),
    Eval(EvalError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub config: Configuration,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub method: Method,
    pub n: usize,
    pub samples: usize,
    pub violations: Vec<Violation>,
    /// Consecutive path configurations compared for continuity.
    pub continuity_pairs: usize,
    pub max_ratio: f64,
    pub envelope: f64,
    /// The pair of configurations realizing `max_ratio`.
    pub worst: Option<(Configuration, Configuration)>,
    /// `None` where `K_n(G)` is not defined (the circle).
    pub transitions: Option<ConsistencyCheck>,
}

impl VerificationReport {
    pub fn continuity_ok(&self) -> bool {
        self.max_ratio <= self.envelope
    }

    pub fn transitions_ok(&self) -> bool {
        self.transitions.as_ref().map_or(true, |t| t.failed == 0)
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.continuity_ok() && self.transitions_ok()
    }
}

/// A vertex with probability 1/8, otherwise a grid point inside a random edge.
pub fn random_point(g: &Graph, rng: &mut ChaCha8Rng) -> Point {
    if rng.gen_ratio(1, 8) {
        return Point::Vertex(VertexId(rng.gen_range(0..g.vertex_count())));
    }
    let e = EdgeId(rng.gen_range(0..g.edge_count()));
    let den = 1i128 << GRANULARITY_BITS;
    Point::Edge(e, q(rng.gen_range(1..den), den))
}

fn separation() -> Q {
    q(1, 1_000_000)
}

fn well_separated(g: &Graph, pts: &[Point]) -> bool {
    (0..pts.len()).all(|i| (0..i).all(|j| shortest_distance(g, &pts[i], &pts[j]) >= separation()))
}

/// A configuration of `n` tokens on the `2^-24` grid, pairwise at least
/// `10^-6` apart.
pub fn random_configuration(g: &Graph, n: usize, rng: &mut ChaCha8Rng) -> Configuration {
    loop {
        let pts: Vec<Point> = (0..n).map(|_| random_point(g, rng)).collect();
        if well_separated(g, &pts) {
            return Configuration(pts);
        }
    }
}

/// Floating point graph distance; avoids large rational denominators.
pub fn distance_f64(g: &Graph, p: &Point, q: &Point) -> f64 {
    let anchors = |p: &Point| match p {
        Point::Vertex(v) => [(*v, 0.0), (*v, 0.0)],
        Point::Edge(e, t) => {
            let t = rational::to_f64(t);
            [(g.edge(*e).tail, t), (g.edge(*e).head, 1.0 - t)]
        }
    };
    let mut best = f64::INFINITY;
    if let (Point::Edge(e1, t1), Point::Edge(e2, t2)) = (p, q) {
        if e1 == e2 {
            best = (rational::to_f64(t1) - rational::to_f64(t2)).abs();
        }
    }
    for (a, da) in anchors(p) {
        for (b, db) in anchors(q) {
            best = best.min(da + g.vertex_distance(a, b) as f64 + db);
        }
    }
    best
}

fn check_point(g: &Graph, f: &IdentifyingFunction, x: &Configuration) -> Result<Point, ViolationKind> {
    let p = f.evaluate(g, x).map_err(ViolationKind::Eval)?;
    match x.token_at(&p) {
        Some(j) => Err(ViolationKind::Collision(j)),
        None => Ok(p),
    }
}

/// Evaluates `f` on random configurations and records every failure.
pub fn verify_identifying(g: &Graph, f: &IdentifyingFunction, samples: usize, seed: u64) -> Vec<Violation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..samples {
        let x = random_configuration(g, f.n, &mut rng);
        if let Err(kind) = check_point(g, f, &x) {
            out.push(Violation { config: x, kind });
        }
    }
    out
}

/// Largest `d(f(x), f(y)) / max_j d(x_j, y_j)` over consecutive points of
/// random piecewise-linear paths; each token travels at most 1/2.
pub fn verify_continuity(
    g: &Graph,
    f: &IdentifyingFunction,
    paths: usize,
    steps: usize,
    seed: u64,
) -> (usize, f64, Option<(Configuration, Configuration)>, Vec<Violation>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut pairs = 0;
    let mut max_ratio = 0.0f64;
    let mut worst = None;
    let mut violations = Vec::new();
    for _ in 0..paths {
        let start = random_configuration(g, f.n, &mut rng);
        let end = random_configuration(g, f.n, &mut rng);
        let travel: Vec<(Q, Q)> = start
            .0
            .iter()
            .zip(&end.0)
            .map(|(a, b)| {
                let d = shortest_distance(g, a, b);
                (d, rational::min(d, q(1, 2)))
            })
            .collect();
        let mut prev: Option<(Configuration, Point)> = None;
        for s in 0..=steps {
            let frac = q(s as i128, steps as i128);
            let pts: Vec<Point> = (0..f.n)
                .map(|j| {
                    let (total, go) = travel[j];
                    let dist = go * frac;
                    if dist == zero() {
                        start.0[j].clone()
                    } else if dist == total {
                        end.0[j].clone()
                    } else {
                        walk_toward(g, &start.0[j], &end.0[j], dist)
                    }
                })
                .collect();
            if !well_separated(g, &pts) {
                prev = None;
                continue;
            }
            let x = Configuration(pts);
            let p = match check_point(g, f, &x) {
                Ok(p) => p,
                Err(kind) => {
                    violations.push(Violation { config: x, kind });
                    prev = None;
                    continue;
                }
            };
            if let Some((px, pp)) = &prev {
                let moved = x
                    .0
                    .iter()
                    .zip(&px.0)
                    .map(|(a, b)| distance_f64(g, a, b))
                    .fold(0.0, f64::max);
                if moved > 0.0 {
                    pairs += 1;
                    let ratio = distance_f64(g, &p, pp) / moved;
                    if ratio > max_ratio {
                        max_ratio = ratio;
                        worst = Some((px.clone(), x.clone()));
                    }
                }
            }
            prev = Some((x, p));
        }
    }
    (pairs, max_ratio, worst, violations)
}

pub fn verify(g: &Graph, f: &IdentifyingFunction, opts: &VerifyOptions) -> VerificationReport {
    let mut violations = verify_identifying(g, f, opts.samples, opts.seed);
    let (continuity_pairs, max_ratio, worst, more) = verify_continuity(g, f, opts.paths, opts.steps, opts.seed);
    violations.extend(more);
    let transitions = verify_transition_consistency(g, f, opts.walks, opts.walk_length, opts.seed).ok();
    VerificationReport {
        method: f.method(),
        n: f.n,
        samples: opts.samples,
        violations,
        continuity_pairs,
        max_ratio,
        envelope: f.method().lipschitz_envelope(),
        worst,
        transitions,
    }
}

/// Sample points of each component of `G \ x`: piece quartiles and free vertices.
fn component_samples(g: &Graph, x: &Configuration) -> Vec<Vec<Point>> {
    let comps = complement_components(g, x);
    comps
        .components
        .iter()
        .map(|c| {
            let mut pts: Vec<Point> = c.vertices.iter().map(|v| Point::Vertex(*v)).collect();
            for piece in &c.pieces {
                for k in 1..4 {
                    let t = piece.lo + (piece.hi - piece.lo) * q(k, 4);
                    pts.push(Point::Edge(piece.edge, t));
                }
            }
            pts
        })
        .collect()
}

fn swept(g: &Graph, a: &Configuration, b: &Configuration, p: &Point) -> bool {
    a.0.iter().zip(&b.0).any(|(u, v)| {
        let uv = shortest_distance(g, u, v);
        shortest_distance(g, u, p) + shortest_distance(g, p, v) == uv
    })
}

/// Relation between components of `G \ a` and `G \ b` obtained by following
/// unswept sample points along a short straight move from `a` to `b`.
fn step_relation(g: &Graph, a: &Configuration, b: &Configuration) -> Vec<BTreeSet<usize>> {
    let target = complement_components(g, b);
    component_samples(g, a)
        .into_iter()
        .map(|pts| {
            pts.iter()
                .filter(|p| !swept(g, a, b, p))
                .filter_map(|p| target.component_of(p).ok())
                .collect()
        })
        .collect()
}

/// Straight-line path between two realizations whose tokens keep their
/// edges; `via` names the end of a loop where a vertex token sits.
fn interpolate(g: &Graph, a: &Configuration, b: &Configuration, frac: Q, via: OrientedEdge) -> Configuration {
    let pos = |p: &Point, e: EdgeId| match p {
        Point::Edge(_, t) => *t,
        Point::Vertex(_) if e == via.edge => via.toward.param(),
        Point::Vertex(v) => {
            if g.edge(e).tail == *v {
                zero()
            } else {
                int(1)
            }
        }
    };
    Configuration(
        a.0.iter()
            .zip(&b.0)
            .map(|(p, r)| {
                let e = match (p, r) {
                    (Point::Edge(e, _), _) | (_, Point::Edge(e, _)) => *e,
                    _ => return p.clone(),
                };
                let t = pos(p, e) + (pos(r, e) - pos(p, e)) * frac;
                Point::on_edge(g, e, t)
            })
            .collect(),
    )
}

/// Follows sample points along the straight move across a skeleton edge.
pub fn simulated_relation(
    g: &Graph,
    a: &Configuration,
    b: &Configuration,
    via: OrientedEdge,
    steps: usize,
) -> Vec<BTreeSet<usize>> {
    let mut rel: Vec<BTreeSet<usize>> = (0..complement_components(g, a).len())
        .map(|i| BTreeSet::from([i]))
        .collect();
    let mut cur = a.clone();
    for s in 1..=steps {
        let next = interpolate(g, a, b, q(s as i128, steps as i128), via);
        let step = step_relation(g, &cur, &next);
        rel = rel
            .into_iter()
            .map(|set| set.iter().flat_map(|&i| step[i].iter().copied()).collect())
            .collect();
        cur = next;
    }
    rel
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionCheck {
    pub edges_checked: usize,
    /// Skeleton edges whose table rows disagree with the simulation.
    pub mismatches: Vec<usize>,
}

/// Random walks on the 1-skeleton; every traversed edge is simulated in both
/// directions and compared with the transition table.
pub fn verify_transition_tables(
    g: &Graph,
    n: usize,
    walks: usize,
    length: usize,
    seed: u64,
) -> Result<TransitionCheck, ComplexError> {
    let sk = one_skeleton(g, n)?;
    let table = TransitionTable::build(g, &sk);
    let inc = sk.incidence();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut mismatches = Vec::new();
    if sk.edges.is_empty() {
        return Ok(TransitionCheck { edges_checked: 0, mismatches });
    }
    for _ in 0..walks {
        let mut node = rng.gen_range(0..sk.nodes.len());
        for _ in 0..length {
            if inc[node].is_empty() {
                break;
            }
            let i = inc[node][rng.gen_range(0..inc[node].len())];
            let edge = &sk.edges[i];
            node = if edge.minus == node { edge.plus } else { edge.minus };
            if !seen.insert(i) {
                continue;
            }
            let minus = realize_vertex(&sk.nodes[edge.minus])?;
            let plus = realize_vertex(&sk.nodes[edge.plus])?;
            let fwd = simulated_relation(g, &minus, &plus, edge.oriented, 64);
            let back = simulated_relation(g, &plus, &minus, edge.oriented, 64);
            let fwd_ok = fwd
                .iter()
                .zip(&table.forward[i])
                .all(|(s, row)| s.iter().copied().eq(row.iter().copied()));
            let back_ok = back
                .iter()
                .zip(&table.backward[i])
                .all(|(s, &c)| s.len() == 1 && s.contains(&c));
            if !fwd_ok || !back_ok {
                mismatches.push(i);
            }
        }
    }
    Ok(TransitionCheck { edges_checked: seen.len(), mismatches })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyCheck {
    pub passed: usize,
    pub failed: usize,
}

/// Walks the 1-skeleton at random; across every traversed edge the component
/// holding `f` must move as the transition relation prescribes.
pub fn verify_transition_consistency(
    g: &Graph,
    f: &IdentifyingFunction,
    walks: usize,
    length: usize,
    seed: u64,
) -> Result<ConsistencyCheck, ComplexError> {
    let sk = one_skeleton(g, f.n)?;
    let table = TransitionTable::build(g, &sk);
    let inc = sk.incidence();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ConsistencyCheck::default();
    let holder = |node: usize| -> Option<usize> {
        let y = realize_vertex(&sk.nodes[node]).ok()?;
        let p = f.evaluate(g, &y).ok()?;
        table.complements[node].component_of(&p).ok()
    };
    for _ in 0..walks {
        let mut node = rng.gen_range(0..sk.nodes.len());
        for _ in 0..length {
            if inc[node].is_empty() {
                break;
            }
            let i = inc[node][rng.gen_range(0..inc[node].len())];
            let edge = &sk.edges[i];
            node = if edge.minus == node { edge.plus } else { edge.minus };
            let ok = match (holder(edge.minus), holder(edge.plus)) {
                (Some(a), Some(b)) => table.forward[i][a].contains(&b) && table.backward[i][b] == a,
                _ => false,
            };
            if ok {
                out.passed += 1;
            } else {
                out.failed += 1;
            }
        }
    }
    Ok(out)
}

/// Components of `G \ x` by depth-first flood fill over the vertices and the
/// open edge segments between consecutive tokens.
#[derive(Clone, Debug)]
pub struct OracleComponents {
    pub count: usize,
    /// Label of each vertex, `None` when occupied.
    vertex: Vec<Option<usize>>,
    /// Labels of each edge's segments, tail to head.
    segments: Vec<Vec<usize>>,
    cuts: Vec<Vec<Q>>,
}

impl OracleComponents {
    /// Label of an unoccupied point.
    pub fn label(&self, p: &Point) -> Option<usize> {
        match p {
            Point::Vertex(v) => self.vertex[v.0],
            Point::Edge(e, t) => {
                let cuts = &self.cuts[e.0];
                if cuts.contains(t) {
                    return None;
                }
                Some(self.segments[e.0][cuts.iter().filter(|c| *c < t).count()])
            }
        }
    }
}

pub fn oracle_components(g: &Graph, x: &Configuration) -> OracleComponents {
    let vcount = g.vertex_count();
    let occupied: Vec<bool> = (0..vcount).map(|v| x.0.contains(&Point::Vertex(VertexId(v)))).collect();
    // nodes: vertices first, then the open segments of every edge
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); vcount];
    let mut first_segment = Vec::with_capacity(g.edge_count());
    let mut cuts = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let mut on: Vec<Q> = x.0.iter().filter_map(|p| match p {
            Point::Edge(f, t) if *f == e => Some(*t),
            _ => None,
        }).collect();
        on.sort();
        let first = adjacency.len();
        let last = first + on.len();
        adjacency.resize(last + 1, Vec::new());
        for (seg, v) in [(first, edge.tail.0), (last, edge.head.0)] {
            if !occupied[v] {
                adjacency[seg].push(v);
                adjacency[v].push(seg);
            }
        }
        first_segment.push(first);
        cuts.push(on);
    }
    let mut label: Vec<Option<usize>> = vec![None; adjacency.len()];
    let mut count = 0;
    for s in 0..adjacency.len() {
        if label[s].is_some() || (s < vcount && occupied[s]) {
            continue;
        }
        label[s] = Some(count);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &adjacency[u] {
                if label[w].is_none() {
                    label[w] = Some(count);
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    let segments = first_segment
        .iter()
        .zip(&cuts)
        .map(|(&f, c)| (f..=f + c.len()).map(|i| label[i].expect("segments are free")).collect())
        .collect();
    OracleComponents { count, vertex: label[..vcount].to_vec(), segments, cuts }
}

/// Face counts of `K_n(G)` per dimension by brute force over every
/// assignment of tokens to edges, branched vertices and oriented edges into
/// branched vertices; an edge holding `m` tokens contributes `m!` orders.
pub fn brute_force_face_counts(g: &Graph, n: usize) -> Vec<usize> {
    // (is a mover slot, vertex it blocks) per non-edge slot
    let mut blocking: Vec<(bool, usize)> = g.branched_vertices().map(|v| (false, v.0)).collect();
    for e in g.edge_ids() {
        for v in [g.edge(e).head, g.edge(e).tail] {
            if g.is_branched(v) {
                blocking.push((true, v.0));
            }
        }
    }
    let edges = g.edge_count();
    let slots = edges + blocking.len();
    let mut counts = vec![0usize; n + 1];
    'assign: for code in 0..slots.pow(n as u32) {
        let mut c = code;
        let mut per_edge = vec![0usize; edges];
        let mut busy = vec![false; g.vertex_count()];
        let mut k = 0;
        for _ in 0..n {
            let i = c % slots;
            c /= slots;
            if i < edges {
                per_edge[i] += 1;
                continue;
            }
            let (mover, v) = blocking[i - edges];
            if busy[v] {
                continue 'assign;
            }
            busy[v] = true;
            k += mover as usize;
        }
        counts[k] += per_edge.iter().map(|&m| (1..=m).product::<usize>()).product::<usize>();
    }
    while counts.len() > 1 && counts[counts.len() - 1] == 0 {
        counts.pop();
    }
    counts
}

/// Whether `complement_components` and the flood fill induce the same
/// partition, checked on every representative and on the probe points.
pub fn oracle_agrees(g: &Graph, x: &Configuration, probes: &[Point]) -> bool {
    let main = complement_components(g, x);
    let oracle = oracle_components(g, x);
    if main.len() != oracle.count {
        return false;
    }
    let mut map = Vec::with_capacity(main.len());
    for c in &main.components {
        match oracle.label(&c.representative()) {
            Some(l) if !map.contains(&l) => map.push(l),
            _ => return false,
        }
    }
    probes.iter().filter(|p| x.token_at(p).is_none()).all(|p| match main.component_of(p) {
        Ok(i) => oracle.label(p) == Some(map[i]),
        Err(_) => false,
    })
}

pub fn oracle_component_count(g: &Graph, x: &Configuration) -> usize {
    oracle_components(g, x).count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build, PartialIdentifyingFunction, Section};
    use crate::catalog;
    use crate::complex::all_faces;

    fn constant(g: &Graph, n: usize, p: Point) -> IdentifyingFunction {
        let values = all_faces(g, n).unwrap()[0].iter().map(|f| (f.clone(), p.clone())).collect();
        IdentifyingFunction { n, kind: Section::Extended(PartialIdentifyingFunction { n, values }) }
    }

    #[test]
    fn constant_function_is_flagged() {
        let g = catalog::star(3);
        let f = constant(&g, 2, Point::Vertex(g.vertex_by_name("c").unwrap()));
        let v = verify_identifying(&g, &f, 1000, 0);
        assert!(!v.is_empty());
        assert!(v.iter().all(|v| matches!(v.kind, ViolationKind::Collision(_))));
    }

    #[test]
    fn discontinuous_extension_is_flagged() {
        let g = catalog::star(3);
        let f = build(&g, 2, Method::Extended, None).unwrap();
        let opts = VerifyOptions { samples: 200, paths: 100, walks: 5, ..Default::default() };
        let r = verify(&g, &f, &opts);
        assert!(r.violations.is_empty());
        assert!(!r.continuity_ok());
        assert!(!r.passed());
    }

    #[test]
    fn antipode_is_an_isometry_on_the_circle() {
        let g = catalog::circle();
        let f = build(&g, 1, Method::Antipode, None).unwrap();
        let (pairs, ratio, _, v) = verify_continuity(&g, &f, 50, 16, 1);
        assert!(pairs > 0 && v.is_empty());
        assert!((ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tree_section_passes_all_checks() {
        let g = catalog::star(4);
        let f = build(&g, 3, Method::Tree, None).unwrap();
        let opts = VerifyOptions { samples: 300, paths: 50, walks: 5, walk_length: 10, ..Default::default() };
        let r = verify(&g, &f, &opts);
        assert!(r.passed(), "{:?}", r.max_ratio);
        assert_eq!(r.transitions.unwrap().failed, 0);
    }

    #[test]
    fn oracle_on_theta_with_both_vertices_occupied() {
        let g = catalog::theta();
        let x = Configuration((0..g.vertex_count()).map(|v| Point::Vertex(VertexId(v))).collect());
        assert_eq!(oracle_component_count(&g, &x), 3);
        assert_eq!(complement_components(&g, &x).len(), 3);
    }

    #[test]
    fn oracle_on_circle_cuts() {
        let g = catalog::circle();
        let e = EdgeId(0);
        let x = Configuration(vec![Point::Edge(e, q(1, 3)), Point::Edge(e, q(2, 3))]);
        assert_eq!(oracle_component_count(&g, &x), 2);
        assert_eq!(oracle_component_count(&g, &Configuration(vec![Point::Edge(e, q(1, 3))])), 1);
    }

    #[test]
    fn random_configurations_are_separated() {
        let g = catalog::theta();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = random_configuration(&g, 3, &mut rng);
            assert_eq!(x.len(), 3);
            assert!(well_separated(&g, &x.0));
        }
    }

    #[test]
    fn tables_match_simulation_on_small_graphs() {
        for g in [catalog::star(3), catalog::lollipop(), catalog::theta()] {
            let c = verify_transition_tables(&g, 2, 3, 6, 2).unwrap();
            assert!(c.edges_checked > 0);
            assert!(c.mismatches.is_empty());
        }
    }
}
