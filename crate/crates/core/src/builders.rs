//! Explicit identifying functions: maps `f: Conf_n(G) -> G` with `f(x) != x_j`.
//!
//! Every builder evaluates in exact rational arithmetic.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{all_faces, face_of_configuration, realize_vertex, ComplexError, Face, OrientedEdge};
use crate::geometry::{shortest_distance, Configuration, Point};
use crate::graph::{EdgeId, End, Graph, VertexId};
use crate::rational::{self, half, int, one, zero, Q};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Antipode,
    Tree,
    Chi0,
    Wedge,
    Extended,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Antipode, Method::Tree, Method::Chi0, Method::Wedge, Method::Extended];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Antipode => "antipode",
            Method::Tree => "tree",
            Method::Chi0 => "chi0",
            Method::Wedge => "wedge",
            Method::Extended => "extended",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.as_str() == s)
    }

    /// Envelope for the continuity ratio `d(f(x), f(y)) / d_max(x, y)`.
    pub fn lipschitz_envelope(self) -> f64 {
        match self {
            Method::Antipode => 2.0,
            Method::Tree | Method::Chi0 => 4.0,
            Method::Wedge | Method::Extended => 8.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("method needs euler characteristic {expected}, graph has {found}")]
    EulerCharacteristic { expected: &'static str, found: i64 },
    #[error("method needs n {0}")]
    TokenCount(&'static str),
    #[error("graph has no embedded circle")]
    NoCircle,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(alloc::string::String),
    #[error("need at least {needed} components of G \\ w attached to w twice, found {found}")]
    TooFewCircles { needed: usize, found: usize },
    #[error("partial function misses face {0}")]
    MissingFace(alloc::string::String),
    #[error("partial function value for face {0} is occupied")]
    OccupiedValue(alloc::string::String),
    #[error("partial function is not extendable at face {face} on edge {edge}")]
    NotExtendable { face: alloc::string::String, edge: alloc::string::String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("configuration has {found} tokens, function expects {expected}")]
    TokenCount { expected: usize, found: usize },
    #[error("no value for face {0}")]
    UnknownFace(alloc::string::String),
    #[error("extension degenerates: the interval around the value collapses")]
    Degenerate,
}

/// Point at distance `s` from the `from` end of `e`.
fn along(g: &Graph, e: EdgeId, from: End, s: Q) -> Point {
    match from {
        End::Tail => Point::on_edge(g, e, s),
        End::Head => Point::on_edge(g, e, one() - s),
    }
}

/// Point at distance `dist` from `p` along a shortest path to `q`.
/// Requires `dist < d(p, q)`; ties between geodesics go to the lowest edge.
pub fn walk_toward(g: &Graph, p: &Point, q: &Point, dist: Q) -> Point {
    let total = shortest_distance(g, p, q);
    debug_assert!(dist < total);
    let mut left = dist;
    let mut u = match p {
        Point::Vertex(v) => *v,
        Point::Edge(e, t) => {
            if let Point::Edge(e2, t2) = q {
                if e2 == e && rational::abs(*t2 - t) == total {
                    let step = if t2 > t { dist } else { -dist };
                    return Point::Edge(*e, *t + step);
                }
            }
            let edge = g.edge(*e);
            let (a, da) = if *t + vertex_to(g, edge.tail, q) == total {
                (End::Tail, *t)
            } else {
                (End::Head, one() - t)
            };
            if left < da {
                return match a {
                    End::Tail => Point::Edge(*e, *t - left),
                    End::Head => Point::Edge(*e, *t + left),
                };
            }
            left -= da;
            g.endpoint(*e, a)
        }
    };
    loop {
        if left == zero() {
            return Point::Vertex(u);
        }
        let here = vertex_to(g, u, q);
        if let Point::Edge(e, t) = q {
            for &(f, end) in g.ends_at(u) {
                if f == *e && rational::abs(*t - end.param()) == here {
                    return along(g, f, end, left);
                }
            }
        }
        let mut moved = false;
        for &(f, end) in g.ends_at(u) {
            let v = g.endpoint(f, end.opposite());
            if one() + vertex_to(g, v, q) == here {
                if left < one() {
                    return along(g, f, end, left);
                }
                left -= one();
                u = v;
                moved = true;
                break;
            }
        }
        assert!(moved, "geodesic step exists");
    }
}

fn vertex_to(g: &Graph, v: VertexId, q: &Point) -> Q {
    shortest_distance(g, &Point::Vertex(v), q)
}

/// A closed walk of oriented edges, parametrised by arc length in `[0, len)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub steps: Vec<OrientedEdge>,
}

impl Circuit {
    pub fn len(&self) -> Q {
        int(self.steps.len() as i128)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The point at arc length `u`, taken modulo the length.
    pub fn point_at(&self, g: &Graph, u: Q) -> Point {
        let m = self.len();
        let u = u - m * int(rational::floor(&(u / m)));
        let i = rational::floor(&u) as usize;
        let s = u - int(i as i128);
        let oe = self.steps[i];
        along(g, oe.edge, oe.toward.opposite(), s)
    }

    /// Tail vertex of the `i`-th step.
    pub fn vertex(&self, g: &Graph, i: usize) -> VertexId {
        g.endpoint(self.steps[i].edge, self.steps[i].toward.opposite())
    }
}

/// Oriented steps of the tree path from `from` to `to` using only `allowed` edges.
fn tree_path(g: &Graph, allowed: &[bool], from: VertexId, to: VertexId) -> Vec<OrientedEdge> {
    let mut parent: Vec<Option<(EdgeId, End)>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[from.0] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &(e, end) in g.ends_at(u) {
            let v = g.endpoint(e, end.opposite());
            if allowed[e.0] && !seen[v.0] {
                seen[v.0] = true;
                parent[v.0] = Some((e, end.opposite()));
                queue.push_back(v);
            }
        }
    }
    let mut steps = Vec::new();
    let mut v = to;
    while v != from {
        let (e, end) = parent[v.0].expect("tree spans the graph");
        steps.push(OrientedEdge { edge: e, toward: end });
        v = g.endpoint(e, end.opposite());
    }
    steps.reverse();
    steps
}

/// The embedded circle closed by the lowest non-tree edge.
pub fn fundamental_circle(g: &Graph) -> Result<Circuit, BuildError> {
    let tree = g.maximal_subtree();
    let mut in_tree = vec![false; g.edge_count()];
    for e in &tree {
        in_tree[e.0] = true;
    }
    let closing = g.edge_ids().find(|e| !in_tree[e.0]).ok_or(BuildError::NoCircle)?;
    let edge = g.edge(closing);
    let mut steps = vec![OrientedEdge::positive(closing)];
    steps.extend(tree_path(g, &in_tree, edge.head, edge.tail));
    Ok(Circuit { steps })
}

/// `f(x) = -r(x)` for a retraction `r` of `G` onto an embedded circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Antipode {
    pub circle: Circuit,
    pub vertex_images: Vec<Q>,
    /// Per edge: image of the tail and signed arc length swept by the edge.
    pub edge_maps: Vec<(Q, Q)>,
}

pub fn build_antipode(g: &Graph, n: usize) -> Result<Antipode, BuildError> {
    if n != 1 {
        return Err(BuildError::TokenCount("= 1"));
    }
    let chi = g.euler_characteristic();
    if chi > 0 {
        return Err(BuildError::EulerCharacteristic { expected: "<= 0", found: chi });
    }
    let circle = fundamental_circle(g)?;
    let m = circle.len();
    let mut image: Vec<Option<Q>> = vec![None; g.vertex_count()];
    let mut on_circle = vec![None; g.edge_count()];
    let mut queue = VecDeque::new();
    for (i, oe) in circle.steps.iter().enumerate() {
        let v = circle.vertex(g, i);
        image[v.0] = Some(int(i as i128));
        queue.push_back(v);
        on_circle[oe.edge.0] = Some(i);
    }
    while let Some(u) = queue.pop_front() {
        for &(e, end) in g.ends_at(u) {
            let v = g.endpoint(e, end.opposite());
            if image[v.0].is_none() {
                image[v.0] = image[u.0];
                queue.push_back(v);
            }
        }
    }
    let edge_maps = g
        .edge_ids()
        .map(|e| match on_circle[e.0] {
            Some(i) if circle.steps[i].is_positive() => (int(i as i128), one()),
            Some(i) => (int(i as i128 + 1), -one()),
            None => {
                let a = image[g.edge(e).tail.0].unwrap();
                let b = image[g.edge(e).head.0].unwrap();
                let mut d = b - a;
                if d < zero() {
                    d += m;
                }
                if d > m * half() {
                    d -= m;
                }
                (a, d)
            }
        })
        .collect();
    let vertex_images = image.into_iter().map(|v| v.unwrap()).collect();
    Ok(Antipode { circle, vertex_images, edge_maps })
}

impl Antipode {
    /// Arc-length coordinate of `r(p)`.
    pub fn retract(&self, p: &Point) -> Q {
        match p {
            Point::Vertex(v) => self.vertex_images[v.0],
            Point::Edge(e, t) => {
                let (a, d) = self.edge_maps[e.0];
                a + d * t
            }
        }
    }

    pub fn evaluate(&self, g: &Graph, x: &Configuration) -> Point {
        self.circle.point_at(g, self.retract(&x.0[0]) + self.circle.len() * half())
    }
}

/// Tree graphs, `n >= 2`: step from `x_1` toward `x_2` by
/// `min({d(x_1, x_k)} ∪ {1}) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeSection;

pub fn build_tree_section(g: &Graph, n: usize) -> Result<TreeSection, BuildError> {
    if n < 2 {
        return Err(BuildError::TokenCount(">= 2"));
    }
    let chi = g.euler_characteristic();
    if chi != 1 {
        return Err(BuildError::EulerCharacteristic { expected: "= 1", found: chi });
    }
    Ok(TreeSection)
}

fn nearest_other(g: &Graph, x: &Configuration) -> Q {
    x.0[1..]
        .iter()
        .map(|p| shortest_distance(g, &x.0[0], p))
        .min()
        .expect("at least two tokens")
}

impl TreeSection {
    pub fn evaluate(&self, g: &Graph, x: &Configuration) -> Point {
        let delta = rational::min(nearest_other(g, x), one()) * half();
        walk_toward(g, &x.0[0], &x.0[1], delta)
    }
}

/// One cycle: every point flows forward along the circle, or toward it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chi0Flow {
    pub circle: Circuit,
    /// Forward orientation of each edge.
    pub forward: Vec<OrientedEdge>,
    /// Forward edge leaving each vertex.
    pub out: Vec<OrientedEdge>,
}

pub fn build_chi0_section(g: &Graph, n: usize) -> Result<Chi0Flow, BuildError> {
    if n < 2 {
        return Err(BuildError::TokenCount(">= 2"));
    }
    let chi = g.euler_characteristic();
    if chi != 0 {
        return Err(BuildError::EulerCharacteristic { expected: "= 0", found: chi });
    }
    let circle = fundamental_circle(g)?;
    let mut forward: Vec<Option<OrientedEdge>> = vec![None; g.edge_count()];
    let mut out: Vec<Option<OrientedEdge>> = vec![None; g.vertex_count()];
    let mut queue = VecDeque::new();
    for (i, oe) in circle.steps.iter().enumerate() {
        forward[oe.edge.0] = Some(*oe);
        let v = circle.vertex(g, i);
        out[v.0] = Some(*oe);
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        for &(e, end) in g.ends_at(u) {
            let v = g.endpoint(e, end.opposite());
            if out[v.0].is_none() {
                let oe = OrientedEdge { edge: e, toward: end };
                forward[e.0] = Some(oe);
                out[v.0] = Some(oe);
                queue.push_back(v);
            }
        }
    }
    Ok(Chi0Flow {
        circle,
        forward: forward.into_iter().map(|o| o.expect("connected")).collect(),
        out: out.into_iter().map(|o| o.expect("connected")).collect(),
    })
}

impl Chi0Flow {
    /// Follows the flow from `p` for arc length `d`.
    pub fn flow(&self, g: &Graph, p: &Point, mut d: Q) -> Point {
        let (mut oe, mut pos) = match p {
            Point::Vertex(v) => (self.out[v.0], zero()),
            Point::Edge(e, t) => {
                let oe = self.forward[e.0];
                (oe, if oe.is_positive() { *t } else { one() - t })
            }
        };
        loop {
            let room = one() - pos;
            if d < room {
                return along(g, oe.edge, oe.toward.opposite(), pos + d);
            }
            d -= room;
            let v = oe.head(g);
            if d == zero() {
                return Point::Vertex(v);
            }
            oe = self.out[v.0];
            pos = zero();
        }
    }

    /// `delta` is capped at half the circle so the flow never wraps back to `x_1`.
    pub fn evaluate(&self, g: &Graph, x: &Configuration) -> Point {
        let delta = rational::min(nearest_other(g, x) * half(), self.circle.len() * half());
        self.flow(g, &x.0[0], delta)
    }
}

/// A point of the wedge `H` of circles at `w`: the center or arc length
/// strictly inside a circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WedgePoint {
    Center,
    On(usize, Q),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Piece {
    circle: Option<usize>,
    /// Lowest edge-end at `w`; the split copy of `w` that starts the circle.
    start: (EdgeId, End),
    length: Q,
    /// Split-graph distances `(to start, to the other copy)` per vertex.
    dist: BTreeMap<VertexId, (Q, Q)>,
}

/// A wedge of at least `n` circles through `w`, retracted onto from `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeSection {
    pub w: VertexId,
    /// Closed walks at `w`, one per component of `G \ w` attached twice.
    pub circles: Vec<Circuit>,
    pub epsilon: Q,
    pieces: Vec<Piece>,
    vertex_piece: Vec<Option<usize>>,
    loop_piece: Vec<Option<usize>>,
}

/// Vertices of `G` with the most components of `G \ w` attached at least twice.
pub fn best_wedge_vertex(g: &Graph) -> (VertexId, usize) {
    g.vertices()
        .map(|w| (w, attached_pieces(g, w).iter().filter(|p| p.1.len() >= 2).count()))
        .fold((VertexId(0), 0), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Components of `G \ w`: per vertex the component label, per loop at `w`
/// its label, and per label the edge-ends at `w` (sorted).
fn attached_pieces(g: &Graph, w: VertexId) -> Vec<(Vec<VertexId>, Vec<(EdgeId, End)>, Vec<EdgeId>)> {
    let mut uf = UnionFind::new(g.vertex_count());
    for e in g.edge_ids() {
        let edge = g.edge(e);
        if edge.tail != w && edge.head != w {
            uf.union(edge.tail.0, edge.head.0);
        }
    }
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out: Vec<(Vec<VertexId>, Vec<(EdgeId, End)>, Vec<EdgeId>)> = Vec::new();
    for v in g.vertices().filter(|&v| v != w) {
        let r = uf.find(v.0);
        let i = *by_root.entry(r).or_insert_with(|| {
            out.push((Vec::new(), Vec::new(), Vec::new()));
            out.len() - 1
        });
        out[i].0.push(v);
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        if edge.is_loop() && edge.tail == w {
            out.push((Vec::new(), vec![(e, End::Tail), (e, End::Head)], vec![e]));
            continue;
        }
        let i = by_root[&uf.find(if edge.tail == w { edge.head.0 } else { edge.tail.0 })];
        if edge.tail == w {
            out[i].1.push((e, End::Tail));
        } else if edge.head == w {
            out[i].1.push((e, End::Head));
        }
        out[i].2.push(e);
    }
    for p in &mut out {
        p.1.sort();
    }
    out
}

pub fn build_wedge_section(g: &Graph, n: usize, w: Option<VertexId>) -> Result<WedgeSection, BuildError> {
    if n == 0 {
        return Err(BuildError::TokenCount(">= 1"));
    }
    let w = match w {
        Some(w) if w.0 < g.vertex_count() => w,
        Some(w) => return Err(BuildError::UnknownVertex(alloc::format!("#{}", w.0))),
        None => best_wedge_vertex(g).0,
    };
    let raw = attached_pieces(g, w);
    let found = raw.iter().filter(|p| p.1.len() >= 2).count();
    if found < n {
        return Err(BuildError::TooFewCircles { needed: n, found });
    }
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by_key(|&i| (raw[i].1.len() < 2, raw[i].1.first().copied()));
    let mut vertex_piece = vec![None; g.vertex_count()];
    let mut loop_piece = vec![None; g.edge_count()];
    let mut pieces = Vec::new();
    let mut circles = Vec::new();
    for &i in &order {
        let (verts, ends, edges) = &raw[i];
        let idx = pieces.len();
        for v in verts {
            vertex_piece[v.0] = Some(idx);
        }
        for e in edges {
            if g.edge(*e).is_loop() && g.edge(*e).tail == w {
                loop_piece[e.0] = Some(idx);
            }
        }
        if ends.len() < 2 {
            pieces.push(Piece {
                circle: None,
                start: ends.first().copied().unwrap_or((EdgeId(0), End::Tail)),
                length: zero(),
                dist: BTreeMap::new(),
            });
            continue;
        }
        let start = ends[0];
        let (steps, dist) = split_distances(g, w, start, edges);
        let length = int(steps.len() as i128);
        pieces.push(Piece { circle: Some(circles.len()), start, length, dist });
        circles.push(Circuit { steps });
    }
    let epsilon = circles.iter().map(|c| c.len()).min().unwrap() / int(4);
    Ok(WedgeSection { w, circles, epsilon, pieces, vertex_piece, loop_piece })
}

/// Breadth-first search in the component with `w` split into the copy
/// holding `start` and the copy holding every other end. Returns a shortest
/// path between the copies and the distances from both copies.
fn split_distances(
    g: &Graph,
    w: VertexId,
    start: (EdgeId, End),
    edges: &[EdgeId],
) -> (Vec<OrientedEdge>, BTreeMap<VertexId, (Q, Q)>) {
    let ws = g.vertex_count();
    let we = ws + 1;
    let node = |e: EdgeId, end: End| {
        let v = g.endpoint(e, end);
        if v != w {
            v.0
        } else if (e, end) == start {
            ws
        } else {
            we
        }
    };
    let mut adj: Vec<Vec<(usize, OrientedEdge)>> = vec![Vec::new(); ws + 2];
    for &e in edges {
        let (a, b) = (node(e, End::Tail), node(e, End::Head));
        adj[a].push((b, OrientedEdge::positive(e)));
        adj[b].push((a, OrientedEdge::negative(e)));
    }
    let bfs = |from: usize| {
        let mut dist: Vec<Option<u32>> = vec![None; ws + 2];
        let mut parent: Vec<Option<(usize, OrientedEdge)>> = vec![None; ws + 2];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &(v, oe) in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    parent[v] = Some((u, oe));
                    queue.push_back(v);
                }
            }
        }
        (dist, parent)
    };
    let (da, parent) = bfs(ws);
    let (db, _) = bfs(we);
    let mut steps = Vec::new();
    let mut v = we;
    while v != ws {
        let (u, oe) = parent[v].expect("both copies lie in one component");
        steps.push(oe);
        v = u;
    }
    steps.reverse();
    let mut dist = BTreeMap::new();
    for v in 0..ws {
        if let (Some(a), Some(b)) = (da[v], db[v]) {
            dist.insert(VertexId(v), (int(a as i128), int(b as i128)));
        }
    }
    (steps, dist)
}

impl WedgeSection {
    fn piece_of(&self, g: &Graph, p: &Point) -> Option<usize> {
        match p {
            Point::Vertex(v) if *v == self.w => None,
            Point::Vertex(v) => self.vertex_piece[v.0],
            Point::Edge(e, _) => {
                let edge = g.edge(*e);
                if edge.is_loop() && edge.tail == self.w {
                    self.loop_piece[e.0]
                } else if edge.tail != self.w {
                    self.vertex_piece[edge.tail.0]
                } else {
                    self.vertex_piece[edge.head.0]
                }
            }
        }
    }

    /// The retraction `G -> H`; only `w` maps to the center.
    pub fn retract(&self, g: &Graph, p: &Point) -> WedgePoint {
        let Some(i) = self.piece_of(g, p) else {
            return WedgePoint::Center;
        };
        let piece = &self.pieces[i];
        let Some(c) = piece.circle else {
            let d = shortest_distance(g, p, &Point::Vertex(self.w));
            return WedgePoint::On(0, rational::min(d, self.circles[0].len() * half()));
        };
        let l = piece.length;
        let node = |e: EdgeId, end: End| {
            let v = g.endpoint(e, end);
            if v != self.w {
                piece.dist[&v]
            } else if (e, end) == piece.start {
                (zero(), l)
            } else {
                (l, zero())
            }
        };
        let (a, b) = match p {
            Point::Vertex(v) => piece.dist[v],
            Point::Edge(e, t) => {
                let (ta, tb) = node(*e, End::Tail);
                let (ha, hb) = node(*e, End::Head);
                let s = one() - t;
                (rational::min(*t + ta, s + ha), rational::min(*t + tb, s + hb))
            }
        };
        WedgePoint::On(c, l * a / (a + b))
    }

    fn center_distance(&self, y: &WedgePoint) -> Q {
        match y {
            WedgePoint::Center => zero(),
            WedgePoint::On(i, s) => rational::min(*s, self.circles[*i].len() - s),
        }
    }

    /// The identifying function on `Conf_n(H)`, also defined when retracted
    /// tokens coincide away from the center.
    pub fn on_wedge(&self, ys: &[WedgePoint]) -> WedgePoint {
        let ds: Vec<Q> = ys.iter().map(|y| self.center_distance(y)).collect();
        let near = (0..ys.len()).min_by_key(|&j| ds[j]).expect("at least one token");
        let d1 = ds[near];
        let rho = (0..ys.len())
            .filter(|&j| j != near)
            .map(|j| ds[j])
            .fold(self.epsilon, rational::min);
        if d1 >= rho {
            return WedgePoint::Center;
        }
        let h = (0..self.circles.len())
            .find(|&c| {
                ys.iter()
                    .enumerate()
                    .all(|(j, y)| j == near || !matches!(y, WedgePoint::On(i, _) if *i == c))
            })
            .expect("n <= number of circles");
        let l = self.circles[h].len();
        let sigma = l * half() * (one() - d1 / rho);
        match ys[near] {
            WedgePoint::On(i, s) if i == h && s < l * half() => WedgePoint::On(h, l - sigma),
            _ => WedgePoint::On(h, sigma),
        }
    }

    pub fn to_graph(&self, g: &Graph, y: &WedgePoint) -> Point {
        match y {
            WedgePoint::Center => Point::Vertex(self.w),
            WedgePoint::On(i, s) => self.circles[*i].point_at(g, *s),
        }
    }

    pub fn evaluate(&self, g: &Graph, x: &Configuration) -> Point {
        let ys: Vec<WedgePoint> = x.0.iter().map(|p| self.retract(g, p)).collect();
        self.to_graph(g, &self.on_wedge(&ys))
    }
}

/// Values on the 0-faces of `K_n(G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialIdentifyingFunction {
    pub n: usize,
    pub values: BTreeMap<Face, Point>,
}

impl PartialIdentifyingFunction {
    /// Samples `f` at the evenly spaced realization of every 0-face.
    pub fn from_function(g: &Graph, f: &IdentifyingFunction) -> Result<Self, BuildError> {
        let faces = all_faces(g, f.n)?.into_iter().next().unwrap_or_default();
        let mut values = BTreeMap::new();
        for face in faces {
            let y = realize_vertex(&face)?;
            let p = f.evaluate(g, &y).map_err(|_| BuildError::MissingFace(face.id(g)))?;
            values.insert(face, p);
        }
        Ok(PartialIdentifyingFunction { n: f.n, values })
    }

    /// Every 0-face has a value, and no value is occupied.
    pub fn validate(&self, g: &Graph) -> Result<(), BuildError> {
        let faces = all_faces(g, self.n)?.into_iter().next().unwrap_or_default();
        for face in faces {
            let p = self.values.get(&face).ok_or_else(|| BuildError::MissingFace(face.id(g)))?;
            if realize_vertex(&face)?.token_at(p).is_some() {
                return Err(BuildError::OccupiedValue(face.id(g)));
            }
        }
        Ok(())
    }
}

/// Rejects a value on a free edge `e` whose branched end `v` is occupied
/// while `e` holds no token.
pub fn check_extendable(g: &Graph, pf: &PartialIdentifyingFunction) -> Result<(), BuildError> {
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let (v, u) = match (g.is_branched(edge.tail), g.is_branched(edge.head)) {
            (true, false) => (edge.tail, edge.head),
            (false, true) => (edge.head, edge.tail),
            _ => continue,
        };
        for (face, p) in &pf.values {
            let on_e = matches!(p, Point::Edge(f, _) if *f == e) || *p == Point::Vertex(u);
            if on_e && face.vertices[v.0].is_some() && face.edges[e.0].is_empty() {
                return Err(BuildError::NotExtendable {
                    face: face.id(g),
                    edge: g.edge_name(e).into(),
                });
            }
        }
    }
    Ok(())
}

pub fn extend_to_full(g: &Graph, pf: PartialIdentifyingFunction) -> Result<IdentifyingFunction, BuildError> {
    pf.validate(g)?;
    check_extendable(g, &pf)?;
    Ok(IdentifyingFunction { n: pf.n, kind: Section::Extended(pf) })
}

impl PartialIdentifyingFunction {
    /// Retracts `x` to the realization `y` of its 0-face and places the value
    /// proportionally between the images of its neighbouring tokens.
    pub fn extend(&self, g: &Graph, x: &Configuration) -> Result<Point, EvalError> {
        let face = face_of_configuration(g, x);
        let p = self.values.get(&face).ok_or_else(|| EvalError::UnknownFace(face.id(g)))?;
        let (e, t) = match p {
            Point::Vertex(v) if g.is_branched(*v) => return Ok(p.clone()),
            Point::Vertex(v) => {
                let (e, end) = g.ends_at(*v)[0];
                (e, end.param())
            }
            Point::Edge(e, t) => (*e, *t),
        };
        let y = realize_vertex(&face).map_err(|_| EvalError::UnknownFace(face.id(g)))?;
        let param_in_x = |j: usize| match &x.0[j] {
            Point::Edge(_, s) => *s,
            Point::Vertex(v) => {
                let (_, end) = g.ends_at(*v)[0];
                end.param()
            }
        };
        let mut anchors: Vec<(Q, Q)> = vec![(zero(), zero())];
        for (s, j) in y.tokens_on_edge(e) {
            anchors.push((s, param_in_x(j)));
        }
        anchors.push((one(), one()));
        let k = anchors.iter().position(|a| a.0 >= t).expect("t <= 1");
        let (a2, b2) = anchors[k];
        let value = if a2 == t {
            b2
        } else {
            let (a1, b1) = anchors[k - 1];
            if b1 == b2 {
                return Err(EvalError::Degenerate);
            }
            b1 + (t - a1) / (a2 - a1) * (b2 - b1)
        };
        let out = Point::on_edge(g, e, value);
        if x.token_at(&out).is_some() {
            return Err(EvalError::Degenerate);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Section {
    Antipode(Antipode),
    Tree(TreeSection),
    Chi0(Chi0Flow),
    Wedge(WedgeSection),
    Extended(PartialIdentifyingFunction),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentifyingFunction {
    pub n: usize,
    pub kind: Section,
}

impl IdentifyingFunction {
    pub fn method(&self) -> Method {
        match self.kind {
            Section::Antipode(_) => Method::Antipode,
            Section::Tree(_) => Method::Tree,
            Section::Chi0(_) => Method::Chi0,
            Section::Wedge(_) => Method::Wedge,
            Section::Extended(_) => Method::Extended,
        }
    }

    pub fn evaluate(&self, g: &Graph, x: &Configuration) -> Result<Point, EvalError> {
        if x.len() != self.n {
            return Err(EvalError::TokenCount { expected: self.n, found: x.len() });
        }
        Ok(match &self.kind {
            Section::Antipode(a) => a.evaluate(g, x),
            Section::Tree(t) => t.evaluate(g, x),
            Section::Chi0(c) => c.evaluate(g, x),
            Section::Wedge(w) => w.evaluate(g, x),
            Section::Extended(pf) => return pf.extend(g, x),
        })
    }
}

/// The method that applies to `(G, n)`, if any.
pub fn auto_method(g: &Graph, n: usize) -> Option<Method> {
    let chi = g.euler_characteristic();
    match (chi, n) {
        (_, 0) => None,
        (1, 1) => None,
        (1, _) => Some(Method::Tree),
        (_, 1) => Some(Method::Antipode),
        (0, _) => Some(Method::Chi0),
        _ if best_wedge_vertex(g).1 >= n => Some(Method::Wedge),
        _ => None,
    }
}

/// Builds `method` for `(G, n)`; `extended` samples the automatic method on
/// 0-faces and extends.
pub fn build(g: &Graph, n: usize, method: Method, w: Option<VertexId>) -> Result<IdentifyingFunction, BuildError> {
    let kind = match method {
        Method::Antipode => Section::Antipode(build_antipode(g, n)?),
        Method::Tree => Section::Tree(build_tree_section(g, n)?),
        Method::Chi0 => Section::Chi0(build_chi0_section(g, n)?),
        Method::Wedge => Section::Wedge(build_wedge_section(g, n, w)?),
        Method::Extended => {
            let base = match auto_method(g, n) {
                Some(Method::Wedge) | None => build(g, n, Method::Wedge, w)?,
                Some(m) => build(g, n, m, w)?,
            };
            return extend_to_full(g, PartialIdentifyingFunction::from_function(g, &base)?);
        }
    };
    Ok(IdentifyingFunction { n, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::graph::GraphSpec;
    use crate::rational::q;
    use crate::verify::verify_identifying;

    fn pt(g: &Graph, e: &str, t: Q) -> Point {
        Point::on_edge(g, g.edge_by_name(e).unwrap(), t)
    }

    fn vx(g: &Graph, v: &str) -> Point {
        Point::Vertex(g.vertex_by_name(v).unwrap())
    }

    #[test]
    fn walk_passes_through_the_center() {
        let g = catalog::star(3);
        let p = pt(&g, "e1", q(1, 2));
        let target = pt(&g, "e2", q(1, 2));
        assert_eq!(walk_toward(&g, &p, &target, q(1, 4)), pt(&g, "e1", q(1, 4)));
        assert_eq!(walk_toward(&g, &p, &target, q(1, 2)), vx(&g, "c"));
        assert_eq!(walk_toward(&g, &p, &target, q(3, 4)), pt(&g, "e2", q(1, 4)));
    }

    #[test]
    fn antipode_on_circle_is_half_turn() {
        let g = catalog::circle();
        let f = build(&g, 1, Method::Antipode, None).unwrap();
        let x = Configuration(vec![pt(&g, "e", q(1, 8))]);
        assert_eq!(f.evaluate(&g, &x).unwrap(), pt(&g, "e", q(5, 8)));
        let x = Configuration(vec![vx(&g, "v")]);
        assert_eq!(f.evaluate(&g, &x).unwrap(), pt(&g, "e", q(1, 2)));
    }

    #[test]
    fn antipode_retraction_fixes_its_circle() {
        for g in [catalog::theta(), catalog::balloon(), catalog::dumbbell(), catalog::wedge_of_circles(3)] {
            let a = build_antipode(&g, 1).unwrap();
            for (i, oe) in a.circle.steps.iter().enumerate() {
                let t = if oe.is_positive() { q(1, 3) } else { q(2, 3) };
                assert_eq!(a.retract(&Point::Edge(oe.edge, t)), int(i as i128) + q(1, 3));
            }
        }
        assert!(matches!(build_antipode(&catalog::star(3), 1), Err(BuildError::EulerCharacteristic { .. })));
    }

    #[test]
    fn tree_section_on_random_trees() {
        for seed in 0..5 {
            let g = catalog::random_tree(seed, 3);
            for n in 2..=3 {
                let f = build(&g, n, Method::Tree, None).unwrap();
                assert!(verify_identifying(&g, &f, 300, seed).is_empty());
            }
        }
    }

    #[test]
    fn chi0_flow_never_wraps_onto_the_first_token() {
        let g = GraphSpec::new(
            &["v", "a", "b", "c"],
            &[("l", "v", "v"), ("s", "v", "a"), ("t1", "a", "b"), ("t2", "a", "c")],
        )
        .build()
        .unwrap();
        let f = build(&g, 2, Method::Chi0, None).unwrap();
        let x = Configuration(vec![vx(&g, "v"), vx(&g, "b")]);
        assert_eq!(f.evaluate(&g, &x).unwrap(), pt(&g, "l", q(1, 2)));
        // off the circle the flow runs toward it
        let x = Configuration(vec![pt(&g, "t1", q(1, 2)), vx(&g, "a")]);
        assert_eq!(f.evaluate(&g, &x).unwrap(), pt(&g, "t1", q(1, 4)));
    }

    #[test]
    fn wedge_near_token_pushes_value_to_antipode() {
        let g = catalog::wedge_of_circles(3);
        let f = build(&g, 3, Method::Wedge, None).unwrap();
        // all tokens far from w: the value is w
        let far = Configuration(vec![pt(&g, "c1", q(1, 2)), pt(&g, "c2", q(1, 2)), pt(&g, "c3", q(1, 2))]);
        assert_eq!(f.evaluate(&g, &far).unwrap(), vx(&g, "w"));
        // a token on w: antipode of the least circle without other tokens
        let on_w = Configuration(vec![vx(&g, "w"), pt(&g, "c1", q(1, 2)), pt(&g, "c3", q(1, 2))]);
        assert_eq!(f.evaluate(&g, &on_w).unwrap(), pt(&g, "c2", q(1, 2)));
    }

    #[test]
    fn wedge_section_on_general_graphs() {
        let g = GraphSpec::new(
            &["w", "a", "b", "u"],
            &[("c", "w", "w"), ("x", "w", "a"), ("y", "w", "a"), ("z", "a", "b"), ("bl", "b", "b"), ("s", "w", "u")],
        )
        .build()
        .unwrap();
        let f = build(&g, 2, Method::Wedge, g.vertex_by_name("w")).unwrap();
        assert!(verify_identifying(&g, &f, 500, 3).is_empty());
        let f = build(&catalog::wedge_of_circles(4), 3, Method::Wedge, None).unwrap();
        assert!(verify_identifying(&catalog::wedge_of_circles(4), &f, 500, 4).is_empty());
        assert!(matches!(
            build(&catalog::theta(), 2, Method::Wedge, None),
            Err(BuildError::TooFewCircles { needed: 2, found: 1 })
        ));
    }

    #[test]
    fn extension_reproduces_values_on_realizations() {
        let g = catalog::star(3);
        let f = build(&g, 2, Method::Extended, None).unwrap();
        let Section::Extended(pf) = &f.kind else { panic!() };
        for (face, p) in &pf.values {
            assert_eq!(&f.evaluate(&g, &realize_vertex(face).unwrap()).unwrap(), p);
        }
        assert!(verify_identifying(&g, &f, 500, 5).is_empty());
    }

    #[test]
    fn extendability_rejects_values_behind_an_occupied_branch_point() {
        let g = catalog::star(3);
        let base = build(&g, 2, Method::Tree, None).unwrap();
        let mut pf = PartialIdentifyingFunction::from_function(&g, &base).unwrap();
        let c = g.vertex_by_name("c").unwrap();
        let e1 = g.edge_by_name("e1").unwrap();
        let face = pf
            .values
            .keys()
            .find(|f| f.vertices[c.0].is_some() && f.edges[e1.0].is_empty())
            .unwrap()
            .clone();
        pf.values.insert(face, pt(&g, "e1", q(1, 2)));
        assert!(matches!(check_extendable(&g, &pf), Err(BuildError::NotExtendable { .. })));
        assert!(extend_to_full(&g, pf).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.as_str()), Some(m));
        }
        assert_eq!(auto_method(&catalog::star(3), 2), Some(Method::Tree));
        assert_eq!(auto_method(&catalog::star(3), 1), None);
        assert_eq!(auto_method(&catalog::lollipop(), 3), Some(Method::Chi0));
        assert_eq!(auto_method(&catalog::theta(), 1), Some(Method::Antipode));
        assert_eq!(auto_method(&catalog::wedge_of_circles(3), 3), Some(Method::Wedge));
        assert_eq!(auto_method(&catalog::theta(), 2), None);
    }
}
