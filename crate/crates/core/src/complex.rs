//! The cube complex `K_n(G)`: faces, boundaries, realization and the 1-skeleton.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Configuration, Point};
use crate::graph::{EdgeId, End, Graph, VertexId};
use crate::rational::q;
use crate::unionfind::UnionFind;

/// An edge together with a direction; it points toward `endpoint(edge, toward)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub toward: End,
}

impl OrientedEdge {
    pub fn positive(edge: EdgeId) -> Self {
        OrientedEdge { edge, toward: End::Head }
    }

    pub fn negative(edge: EdgeId) -> Self {
        OrientedEdge { edge, toward: End::Tail }
    }

    pub fn is_positive(&self) -> bool {
        self.toward == End::Head
    }

    pub fn head(&self, g: &Graph) -> VertexId {
        g.endpoint(self.edge, self.toward)
    }

    pub fn reversed(&self) -> Self {
        OrientedEdge { edge: self.edge, toward: self.toward.opposite() }
    }

    /// Oriented edges whose head is a branched vertex, in canonical order.
    pub fn into_branched(g: &Graph) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for e in g.edge_ids() {
            for toward in [End::Tail, End::Head] {
                let oe = OrientedEdge { edge: e, toward };
                if g.is_branched(oe.head(g)) {
                    out.push(oe);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("the one-vertex circle has no branched vertex and no useful complex")]
    CircleConvention,
    #[error("at least one token is required")]
    NoTokens,
    #[error("face has no mover on the given oriented edge")]
    NoMover,
    #[error("not a 0-face")]
    NotVertex,
    #[error("invalid face: {0}")]
    Invalid(&'static str),
}

/// Where a token sits in a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Edge { edge: EdgeId, position: usize },
    Vertex(VertexId),
    Mover(OrientedEdge),
}

/// A face of `K_n(G)`. Tokens are `0..n`; `movers` is sorted by oriented edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub edges: Vec<Vec<usize>>,
    pub vertices: Vec<Option<usize>>,
    pub movers: Vec<(OrientedEdge, usize)>,
}

impl Face {
    pub fn empty(g: &Graph) -> Self {
        Face {
            edges: vec![Vec::new(); g.edge_count()],
            vertices: vec![None; g.vertex_count()],
            movers: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.movers.len()
    }

    pub fn token_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum::<usize>()
            + self.vertices.iter().flatten().count()
            + self.movers.len()
    }

    pub fn mover_on(&self, oe: OrientedEdge) -> Option<usize> {
        self.movers.iter().find(|(o, _)| *o == oe).map(|(_, i)| *i)
    }

    pub fn slot_of(&self, token: usize) -> Option<Slot> {
        for (e, tuple) in self.edges.iter().enumerate() {
            if let Some(position) = tuple.iter().position(|&t| t == token) {
                return Some(Slot::Edge { edge: EdgeId(e), position });
            }
        }
        if let Some(v) = self.vertices.iter().position(|x| *x == Some(token)) {
            return Some(Slot::Vertex(VertexId(v)));
        }
        self.movers.iter().find(|(_, t)| *t == token).map(|(o, _)| Slot::Mover(*o))
    }

    /// Checks the face conditions against `g` for `n` tokens.
    pub fn validate(&self, g: &Graph, n: usize) -> Result<(), ComplexError> {
        if self.edges.len() != g.edge_count() || self.vertices.len() != g.vertex_count() {
            return Err(ComplexError::Invalid("shape does not match graph"));
        }
        let mut seen = vec![false; n];
        let mut mark = |t: usize| -> Result<(), ComplexError> {
            if t >= n || seen[t] {
                return Err(ComplexError::Invalid("every token must appear exactly once"));
            }
            seen[t] = true;
            Ok(())
        };
        for &t in self.edges.iter().flatten() {
            mark(t)?;
        }
        for (v, t) in self.vertices.iter().enumerate() {
            if let Some(t) = t {
                if !g.is_branched(VertexId(v)) {
                    return Err(ComplexError::Invalid("vertex slot on an unbranched vertex"));
                }
                mark(*t)?;
            }
        }
        for w in self.movers.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(ComplexError::Invalid("movers not sorted"));
            }
        }
        let mut used = vec![false; g.vertex_count()];
        for (v, t) in self.vertices.iter().enumerate() {
            used[v] = t.is_some();
        }
        for (oe, t) in &self.movers {
            let h = oe.head(g);
            if !g.is_branched(h) {
                return Err(ComplexError::Invalid("mover toward an unbranched vertex"));
            }
            if used[h.0] {
                return Err(ComplexError::Invalid("two claims on one branched vertex"));
            }
            used[h.0] = true;
            mark(*t)?;
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(ComplexError::Invalid("every token must appear exactly once"))
        }
    }

    /// Canonical id with 1-based tokens, e.g. `e1=(1,2);a=3;e2+>4`.
    pub fn id(&self, g: &Graph) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (e, tuple) in self.edges.iter().enumerate() {
            if !tuple.is_empty() {
                let inner: Vec<String> = tuple.iter().map(|t| format!("{}", t + 1)).collect();
                parts.push(format!("{}=({})", g.edge_name(EdgeId(e)), inner.join(",")));
            }
        }
        for (v, t) in self.vertices.iter().enumerate() {
            if let Some(t) = t {
                parts.push(format!("{}={}", g.vertex_name(VertexId(v)), t + 1));
            }
        }
        for (oe, t) in &self.movers {
            let sign = if oe.is_positive() { '+' } else { '-' };
            parts.push(format!("{}{}>{}", g.edge_name(oe.edge), sign, t + 1));
        }
        parts.join(";")
    }
}

fn reject_degenerate(g: &Graph, n: usize) -> Result<(), ComplexError> {
    if n == 0 {
        return Err(ComplexError::NoTokens);
    }
    if g.is_circle() {
        return Err(ComplexError::CircleConvention);
    }
    Ok(())
}

/// All faces of `K_n(G)`, bucketed by dimension, each bucket sorted.
pub fn all_faces(g: &Graph, n: usize) -> Result<Vec<Vec<Face>>, ComplexError> {
    reject_degenerate(g, n)?;
    let movable = OrientedEdge::into_branched(g);
    let mut out: Vec<Vec<Face>> = Vec::new();
    let mut face = Face::empty(g);
    let mut claimed = vec![false; g.vertex_count()];
    place(g, n, 0, &movable, &mut face, &mut claimed, &mut out);
    for bucket in &mut out {
        bucket.sort();
    }
    while out.last().map_or(false, Vec::is_empty) {
        out.pop();
    }
    Ok(out)
}

/// Token `t` goes to an edge (any insertion point), a free branched vertex, or
/// an unclaimed mover slot.
fn place(
    g: &Graph,
    n: usize,
    t: usize,
    movable: &[OrientedEdge],
    face: &mut Face,
    claimed: &mut [bool],
    out: &mut Vec<Vec<Face>>,
) {
    if t == n {
        let k = face.dim();
        if out.len() <= k {
            out.resize_with(k + 1, Vec::new);
        }
        let mut f = face.clone();
        f.movers.sort();
        out[k].push(f);
        return;
    }
    for e in 0..face.edges.len() {
        for pos in 0..=face.edges[e].len() {
            face.edges[e].insert(pos, t);
            place(g, n, t + 1, movable, face, claimed, out);
            face.edges[e].remove(pos);
        }
    }
    for v in g.branched_vertices() {
        if !claimed[v.0] {
            claimed[v.0] = true;
            face.vertices[v.0] = Some(t);
            place(g, n, t + 1, movable, face, claimed, out);
            face.vertices[v.0] = None;
            claimed[v.0] = false;
        }
    }
    for oe in movable {
        let h = oe.head(g).0;
        if !claimed[h] {
            claimed[h] = true;
            face.movers.push((*oe, t));
            place(g, n, t + 1, movable, face, claimed, out);
            face.movers.pop();
            claimed[h] = false;
        }
    }
}

/// The `k`-faces of `K_n(G)` in canonical order.
pub fn enumerate_faces(g: &Graph, n: usize, k: usize) -> Result<Vec<Face>, ComplexError> {
    Ok(all_faces(g, n)?.into_iter().nth(k).unwrap_or_default())
}

/// `(F_e^+, F_e^-)`: the mover arrives at the head vertex, or rejoins its edge
/// at the end nearest that vertex.
pub fn boundary(g: &Graph, f: &Face, oe: OrientedEdge) -> Result<(Face, Face), ComplexError> {
    let t = f.mover_on(oe).ok_or(ComplexError::NoMover)?;
    let mut plus = f.clone();
    plus.movers.retain(|(o, _)| *o != oe);
    let mut minus = plus.clone();
    plus.vertices[oe.head(g).0] = Some(t);
    let tuple = &mut minus.edges[oe.edge.0];
    if oe.is_positive() {
        tuple.push(t);
    } else {
        tuple.insert(0, t);
    }
    Ok((plus, minus))
}

/// Even spacing: the `j`-th of `l` tokens on an edge sits at `j/(l+1)`.
pub fn realize_vertex(f: &Face) -> Result<Configuration, ComplexError> {
    if f.dim() != 0 {
        return Err(ComplexError::NotVertex);
    }
    let n = f.token_count();
    let mut pts: Vec<Option<Point>> = vec![None; n];
    for (e, tuple) in f.edges.iter().enumerate() {
        let l = tuple.len() as i128;
        for (j, &t) in tuple.iter().enumerate() {
            pts[t] = Some(Point::Edge(EdgeId(e), q(j as i128 + 1, l + 1)));
        }
    }
    for (v, t) in f.vertices.iter().enumerate() {
        if let Some(t) = t {
            pts[*t] = Some(Point::Vertex(VertexId(v)));
        }
    }
    Ok(Configuration(pts.into_iter().map(|p| p.expect("face covers every token")).collect()))
}

/// The 0-face recording the combinatorial type of `x`: edge order, tokens on
/// branched vertices, and tokens on free vertices pushed to the extreme slot.
pub fn face_of_configuration(g: &Graph, x: &Configuration) -> Face {
    let mut face = Face::empty(g);
    let mut front: Vec<Vec<usize>> = vec![Vec::new(); g.edge_count()];
    for e in g.edge_ids() {
        face.edges[e.0] = x.tokens_on_edge(e).into_iter().map(|(_, t)| t).collect();
    }
    for (t, p) in x.points().iter().enumerate() {
        if let Point::Vertex(v) = p {
            if g.is_branched(*v) {
                face.vertices[v.0] = Some(t);
            } else {
                let (e, end) = g.ends_at(*v)[0];
                match end {
                    End::Tail => front[e.0].push(t),
                    End::Head => face.edges[e.0].push(t),
                }
            }
        }
    }
    for (e, ts) in front.into_iter().enumerate() {
        for t in ts {
            face.edges[e].insert(0, t);
        }
    }
    face
}

/// A 1-face seen as an edge of the skeleton, from `minus` to `plus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonEdge {
    pub minus: usize,
    pub plus: usize,
    pub oriented: OrientedEdge,
    pub mover: usize,
    pub face: Face,
}

/// The 1-skeleton of `K_n(G)` with connected components.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub n: usize,
    pub nodes: Vec<Face>,
    pub edges: Vec<SkeletonEdge>,
    pub component: Vec<usize>,
    pub component_count: usize,
    index: BTreeMap<Face, usize>,
}

impl Skeleton {
    pub fn node_of(&self, f: &Face) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Skeleton edges incident to each node.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.minus].push(i);
            inc[e.plus].push(i);
        }
        inc
    }
}

pub fn one_skeleton(g: &Graph, n: usize) -> Result<Skeleton, ComplexError> {
    let mut faces = all_faces(g, n)?.into_iter();
    let nodes = faces.next().unwrap_or_default();
    let ones = faces.next().unwrap_or_default();
    let index: BTreeMap<Face, usize> = nodes.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    let mut uf = UnionFind::new(nodes.len());
    let mut edges = Vec::with_capacity(ones.len());
    for f in ones {
        let (oe, mover) = f.movers[0];
        let (plus, minus) = boundary(g, &f, oe)?;
        let (p, m) = (index[&plus], index[&minus]);
        uf.union(p, m);
        edges.push(SkeletonEdge { minus: m, plus: p, oriented: oe, mover, face: f });
    }
    let (component, component_count) = uf.labels();
    Ok(Skeleton { n, nodes, edges, component, component_count, index })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStats {
    pub cells_per_dim: Vec<usize>,
    pub euler: i64,
    pub dim: usize,
    pub component_count: usize,
}

pub fn complex_stats(g: &Graph, n: usize) -> Result<ComplexStats, ComplexError> {
    let cells: Vec<usize> = all_faces(g, n)?.iter().map(Vec::len).collect();
    let euler = cells
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    let component_count = one_skeleton(g, n)?.component_count;
    Ok(ComplexStats { dim: cells.len() - 1, cells_per_dim: cells, euler, component_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn theta_counts() {
        let g = catalog::theta();
        assert_eq!(complex_stats(&g, 1).unwrap().cells_per_dim, vec![5, 6]);
        let s = complex_stats(&g, 2).unwrap();
        assert_eq!(s.cells_per_dim, vec![26, 48, 18]);
        assert_eq!(s.euler, -4);
        assert_eq!(enumerate_faces(&g, 3, 0).unwrap().len(), 150);
    }

    #[test]
    fn star_and_interval() {
        let s = catalog::star(3);
        let st = complex_stats(&s, 1).unwrap();
        assert_eq!(st.cells_per_dim, vec![4, 3]);
        assert_eq!(st.component_count, 1);
        assert_eq!(complex_stats(&s, 2).unwrap().dim, 1);
        let sk = one_skeleton(&catalog::interval(), 2).unwrap();
        assert_eq!(sk.nodes.len(), 2);
        assert!(sk.edges.is_empty());
        assert_eq!(sk.component_count, 2);
    }

    #[test]
    fn circle_rejected() {
        assert_eq!(
            complex_stats(&catalog::circle(), 2).unwrap_err(),
            ComplexError::CircleConvention
        );
    }

    fn one_face_theta(oe: OrientedEdge) -> Face {
        let g = catalog::theta();
        let mut f = Face::empty(&g);
        f.edges[0] = vec![0];
        f.movers.push((oe, 1));
        f.validate(&g, 2).unwrap();
        f
    }

    #[test]
    fn boundary_attaches_back_or_front() {
        let g = catalog::theta();
        let pos = OrientedEdge::positive(EdgeId(0));
        let (plus, minus) = boundary(&g, &one_face_theta(pos), pos).unwrap();
        assert_eq!(minus.edges[0], vec![0, 1]);
        assert_eq!(plus.vertices[g.vertex_by_name("b").unwrap().0], Some(1));
        assert!(plus.movers.is_empty());
        let neg = OrientedEdge::negative(EdgeId(0));
        let (plus, minus) = boundary(&g, &one_face_theta(neg), neg).unwrap();
        assert_eq!(minus.edges[0], vec![1, 0]);
        assert_eq!(plus.vertices[g.vertex_by_name("a").unwrap().0], Some(1));
        assert_eq!(
            boundary(&g, &one_face_theta(neg), pos).unwrap_err(),
            ComplexError::NoMover
        );
    }

    #[test]
    fn realization_spacing() {
        let g = catalog::dumbbell();
        let mut f = Face::empty(&g);
        f.edges[0] = vec![2, 0, 4];
        f.vertices[1] = Some(1);
        f.edges[2] = vec![3];
        let x = realize_vertex(&f).unwrap();
        assert_eq!(x.0[2], Point::Edge(EdgeId(0), q(1, 4)));
        assert_eq!(x.0[0], Point::Edge(EdgeId(0), q(2, 4)));
        assert_eq!(x.0[4], Point::Edge(EdgeId(0), q(3, 4)));
        assert_eq!(x.0[1], Point::Vertex(VertexId(1)));
        assert_eq!(x.0[3], Point::Edge(EdgeId(2), q(1, 2)));
        assert_eq!(face_of_configuration(&g, &x), f);
    }

    #[test]
    fn free_vertex_tokens_go_to_extreme_slot() {
        let g = catalog::star(3);
        let leaf = g.vertex_by_name("l1").unwrap();
        let e1 = g.edge_by_name("e1").unwrap();
        let x = Configuration(vec![Point::Edge(e1, q(1, 2)), Point::Vertex(leaf)]);
        assert_eq!(face_of_configuration(&g, &x).edges[e1.0], vec![0, 1]);
    }

    #[test]
    fn face_ids() {
        let g = catalog::theta();
        let f = one_face_theta(OrientedEdge::positive(EdgeId(0)));
        assert_eq!(f.id(&g), "e1=(1);e1+>2");
    }
}
