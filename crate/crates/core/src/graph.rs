//! Finite graphs with unit-length edges.
//!
//! Every vertex has degree different from 2, except for the circle, which is
//! represented as a single loop on one vertex. Edges carry a fixed positive
//! orientation from `tail` to `head`; loops have `tail == head`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::geometry::Point;
use crate::rational::{q, Q};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// One of the two ends of an edge. Parameter 0 is the tail end, 1 the head end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }

    /// Edge parameter of this end.
    pub fn param(self) -> Q {
        match self {
            End::Tail => q(0, 1),
            End::Head => q(1, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph has no edges")]
    NoEdges,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex `{0}` has degree 2; suppress it (e.g. with --suppress2) or merge its edges")]
    DegreeTwo(String),
    #[error("graph is a tree; it has no core")]
    Tree,
}

/// Name-level description of a graph, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub name: String,
    pub tail: String,
    pub head: String,
}

impl EdgeSpec {
    pub fn new(name: &str, tail: &str, head: &str) -> Self {
        EdgeSpec {
            name: name.to_string(),
            tail: tail.to_string(),
            head: head.to_string(),
        }
    }
}

impl GraphSpec {
    pub fn new(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Self {
        GraphSpec {
            vertices: vertices.iter().map(|v| v.to_string()).collect(),
            edges: edges.iter().map(|(e, t, h)| EdgeSpec::new(e, t, h)).collect(),
        }
    }

    fn degree_of(&self, v: &str) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    fn is_circle(&self) -> bool {
        self.vertices.len() == 1 && self.edges.len() == 1
    }

    /// Suppresses degree-2 vertices by merging their two edges, until none is
    /// left (a cycle collapses to the single-loop circle). The merged edge is
    /// named `a+b` and keeps the orientation of its first constituent.
    pub fn suppress_degree_two(&mut self) {
        self.suppress_tracking(&mut BTreeMap::new());
    }

    /// Same as [`suppress_degree_two`](Self::suppress_degree_two) but records,
    /// for every live edge, the suppressed vertices lying in its interior in
    /// tail-to-head order.
    fn suppress_tracking(&mut self, chains: &mut BTreeMap<String, Vec<String>>) {
        loop {
            if self.is_circle() {
                return;
            }
            let Some(x) = self
                .vertices
                .iter()
                .find(|v| self.degree_of(v) == 2)
                .cloned()
            else {
                return;
            };
            let incident: Vec<usize> = (0..self.edges.len())
                .filter(|&i| self.edges[i].tail == x || self.edges[i].head == x)
                .collect();
            if incident.len() != 2 {
                // a lone loop on x with further vertices cannot happen in a
                // connected graph
                return;
            }
            let (i1, i2) = (incident[0], incident[1]);
            let e1 = self.edges[i1].clone();
            let e2 = self.edges[i2].clone();
            // orient e1 as a -> x and e2 as x -> b
            let mut chain1 = chains.remove(&e1.name).unwrap_or_default();
            let a = if e1.head == x {
                e1.tail.clone()
            } else {
                chain1.reverse();
                e1.head.clone()
            };
            let mut chain2 = chains.remove(&e2.name).unwrap_or_default();
            let b = if e2.tail == x {
                e2.head.clone()
            } else {
                chain2.reverse();
                e2.tail.clone()
            };
            let mut chain = chain1;
            chain.push(x.clone());
            chain.extend(chain2);
            let merged = EdgeSpec {
                name: format!("{}+{}", e1.name, e2.name),
                tail: a,
                head: b,
            };
            chains.insert(merged.name.clone(), chain);
            self.edges[i1] = merged;
            self.edges.remove(i2);
            self.vertices.retain(|v| *v != x);
        }
    }

    pub fn build(self) -> Result<Graph, GraphError> {
        Graph::from_spec(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn endpoint(&self, end: End) -> VertexId {
        match end {
            End::Tail => self.tail,
            End::Head => self.head,
        }
    }
}

/// A validated, immutable graph.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    degree: Vec<usize>,
    ends_at: Vec<Vec<(EdgeId, End)>>,
    dist: Vec<Vec<u32>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_names == other.vertex_names && self.edges == other.edges
    }
}

impl Graph {
    pub fn from_spec(spec: GraphSpec) -> Result<Graph, GraphError> {
        if spec.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        if spec.edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let mut index = BTreeMap::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if index.insert(v.clone(), VertexId(i)).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            if !seen.insert(e.name.clone()) {
                return Err(GraphError::DuplicateEdge(e.name.clone()));
            }
            let lookup = |name: &String| {
                index.get(name).copied().ok_or_else(|| GraphError::UnknownVertex {
                    edge: e.name.clone(),
                    vertex: name.clone(),
                })
            };
            edges.push(Edge {
                name: e.name.clone(),
                tail: lookup(&e.tail)?,
                head: lookup(&e.head)?,
            });
        }
        let nv = spec.vertices.len();
        let mut degree = vec![0; nv];
        let mut ends_at = vec![Vec::new(); nv];
        let mut uf = UnionFind::new(nv);
        for (i, e) in edges.iter().enumerate() {
            degree[e.tail.0] += 1;
            degree[e.head.0] += 1;
            ends_at[e.tail.0].push((EdgeId(i), End::Tail));
            ends_at[e.head.0].push((EdgeId(i), End::Head));
            uf.union(e.tail.0, e.head.0);
        }
        if uf.labels().1 != 1 {
            return Err(GraphError::Disconnected);
        }
        let circle = nv == 1 && edges.len() == 1;
        if !circle {
            if let Some(v) = (0..nv).find(|&v| degree[v] == 2) {
                return Err(GraphError::DegreeTwo(spec.vertices[v].clone()));
            }
        }
        let mut g = Graph {
            vertex_names: spec.vertices,
            edges,
            degree,
            ends_at,
            dist: Vec::new(),
        };
        g.dist = (0..nv).map(|s| g.bfs(VertexId(s))).collect();
        Ok(g)
    }

    fn bfs(&self, s: VertexId) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.vertex_count()];
        d[s.0] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(e, end) in &self.ends_at[u.0] {
                let w = self.edges[e.0].endpoint(end.opposite());
                if d[w.0] == u32::MAX {
                    d[w.0] = d[u.0] + 1;
                    queue.push_back(w);
                }
            }
        }
        d
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertex_names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    name: e.name.clone(),
                    tail: self.vertex_names[e.tail.0].clone(),
                    head: self.vertex_names[e.head.0].clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn endpoint(&self, e: EdgeId, end: End) -> VertexId {
        self.edges[e.0].endpoint(end)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|v| v == name).map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(EdgeId)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.degree[v.0]
    }

    pub fn is_branched(&self, v: VertexId) -> bool {
        self.degree[v.0] >= 3
    }

    pub fn is_free(&self, v: VertexId) -> bool {
        self.degree[v.0] == 1
    }

    pub fn branched_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| self.is_branched(v))
    }

    /// Edge-ends incident to `v`; a loop contributes both of its ends.
    pub fn ends_at(&self, v: VertexId) -> &[(EdgeId, End)] {
        &self.ends_at[v.0]
    }

    /// The single-loop circle.
    pub fn is_circle(&self) -> bool {
        self.vertex_count() == 1 && self.edge_count() == 1
    }

    /// `|V| - |E|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }

    /// Combinatorial distance between vertices (every edge has length 1).
    pub fn vertex_distance(&self, a: VertexId, b: VertexId) -> u32 {
        self.dist[a.0][b.0]
    }

    /// Whether deleting an interior point of `e` disconnects the graph.
    pub fn is_bridge(&self, e: EdgeId) -> bool {
        if self.edges[e.0].is_loop() {
            return false;
        }
        let mut uf = UnionFind::new(self.vertex_count());
        for (i, other) in self.edges.iter().enumerate() {
            if i != e.0 {
                uf.union(other.tail.0, other.head.0);
            }
        }
        uf.find(self.edges[e.0].tail.0) != uf.find(self.edges[e.0].head.0)
    }

    /// Edges of a spanning tree, found by breadth-first search from the first
    /// vertex. Loops are never tree edges.
    pub fn maximal_subtree(&self) -> Vec<EdgeId> {
        let mut seen = vec![false; self.vertex_count()];
        let mut tree = Vec::new();
        seen[0] = true;
        let mut queue = VecDeque::from([VertexId(0)]);
        while let Some(u) = queue.pop_front() {
            for &(e, end) in &self.ends_at[u.0] {
                let w = self.endpoint(e, end.opposite());
                if !seen[w.0] {
                    seen[w.0] = true;
                    tree.push(e);
                    queue.push_back(w);
                }
            }
        }
        tree.sort();
        tree
    }

    pub fn classify_core(&self) -> CoreClass {
        let loops = self.edges.iter().filter(|e| e.is_loop()).count();
        let degrees_are = |d: usize| self.degree.iter().all(|&x| x == d);
        match (self.vertex_count(), self.edge_count()) {
            (1, 1) => CoreClass::Circle,
            (1, 2) if loops == 2 => CoreClass::Infinity,
            (2, 3) if degrees_are(3) && loops == 0 => CoreClass::Theta,
            (2, 3) if degrees_are(3) && loops == 2 => {
                let a = self.edges.iter().filter(|e| e.is_loop()).map(|e| e.tail);
                let distinct: BTreeSet<VertexId> = a.collect();
                if distinct.len() == 2 {
                    CoreClass::Dumbbell
                } else {
                    CoreClass::Other
                }
            }
            _ => CoreClass::Other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreClass {
    Circle,
    Infinity,
    Theta,
    Dumbbell,
    Other,
}

impl CoreClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CoreClass::Circle => "circle",
            CoreClass::Infinity => "infinity",
            CoreClass::Theta => "theta",
            CoreClass::Dumbbell => "dumbbell",
            CoreClass::Other => "other",
        }
    }
}

/// The core of a graph together with where each deleted piece was attached.
#[derive(Clone, Debug)]
pub struct CoreReduction {
    pub core: Graph,
    /// Removed vertex and edge names mapped to their attachment point in the core.
    pub collapsed: BTreeMap<String, Point>,
}

/// Deletes free edges until no free vertex remains, then suppresses the
/// degree-2 vertices this created.
pub fn core_reduction(g: &Graph) -> Result<CoreReduction, GraphError> {
    if g.euler_characteristic() > 0 {
        return Err(GraphError::Tree);
    }
    let mut spec = g.to_spec();
    // name -> name of the vertex it was attached to when deleted
    let mut attach: BTreeMap<String, String> = BTreeMap::new();
    loop {
        let leaf = spec.vertices.iter().find(|v| spec.degree_of(v) == 1).cloned();
        let Some(u) = leaf else { break };
        let i = spec
            .edges
            .iter()
            .position(|e| e.tail == u || e.head == u)
            .expect("free vertex has an edge");
        let e = spec.edges.remove(i);
        let other = if e.tail == u { e.head } else { e.tail };
        attach.insert(u.clone(), other.clone());
        attach.insert(e.name, other);
        spec.vertices.retain(|v| *v != u);
    }
    let mut chains = BTreeMap::new();
    spec.suppress_tracking(&mut chains);
    let core = spec.build()?;

    // position of suppressed vertices inside core edges
    let mut interior: BTreeMap<String, Point> = BTreeMap::new();
    for (edge_name, chain) in &chains {
        let e = core.edge_by_name(edge_name).expect("chain edge is live");
        let m = chain.len() as i128 + 1;
        for (k, x) in chain.iter().enumerate() {
            interior.insert(x.clone(), Point::Edge(e, q(k as i128 + 1, m)));
        }
    }
    let resolve = |start: &String| -> Point {
        let mut cur = start.clone();
        loop {
            if let Some(v) = core.vertex_by_name(&cur) {
                return Point::Vertex(v);
            }
            if let Some(p) = interior.get(&cur) {
                return p.clone();
            }
            cur = attach
                .get(&cur)
                .cloned()
                .expect("every deleted vertex resolves to the core");
        }
    };
    let mut collapsed = BTreeMap::new();
    for (name, target) in &attach {
        collapsed.insert(name.clone(), resolve(target));
    }
    Ok(CoreReduction { core, collapsed })
}
