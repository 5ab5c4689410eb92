//! Points, configurations and the connected components of `G \ x`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::graph::{EdgeId, End, Graph, VertexId};
use crate::rational::{self, half, one, zero, Q};
use crate::unionfind::UnionFind;

/// A location on the graph: a vertex, or an interior point of an edge at a
/// parameter strictly between 0 and 1 (measured along the positive orientation).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(VertexId),
    Edge(EdgeId, Q),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("edge parameter must lie strictly between 0 and 1")]
    ParameterOutOfRange,
    #[error("point references a vertex or edge that does not exist")]
    UnknownId,
    #[error("tokens {0} and {1} coincide")]
    Collision(usize, usize),
    #[error("point is occupied by a token")]
    Occupied,
    #[error("extra point does not border the component")]
    NotBordering,
}

impl Point {
    /// Builds the point at parameter `t` of `e`, mapping 0 and 1 to endpoints.
    pub fn on_edge(g: &Graph, e: EdgeId, t: Q) -> Point {
        if t == zero() {
            Point::Vertex(g.edge(e).tail)
        } else if t == one() {
            Point::Vertex(g.edge(e).head)
        } else {
            Point::Edge(e, t)
        }
    }

    pub fn validate(&self, g: &Graph) -> Result<(), GeometryError> {
        match self {
            Point::Vertex(v) if v.0 < g.vertex_count() => Ok(()),
            Point::Edge(e, t) if e.0 < g.edge_count() => {
                if *t > zero() && *t < one() {
                    Ok(())
                } else {
                    Err(GeometryError::ParameterOutOfRange)
                }
            }
            _ => Err(GeometryError::UnknownId),
        }
    }

    /// Ways to leave the point toward a vertex: `(vertex, distance)`.
    fn anchors(&self, g: &Graph) -> [(VertexId, Q); 2] {
        match self {
            Point::Vertex(v) => [(*v, zero()), (*v, zero())],
            Point::Edge(e, t) => [
                (g.edge(*e).tail, *t),
                (g.edge(*e).head, one() - t),
            ],
        }
    }
}

/// Shortest-path distance with unit edge lengths.
pub fn shortest_distance(g: &Graph, p: &Point, q: &Point) -> Q {
    let mut best: Option<Q> = None;
    let mut offer = |d: Q| {
        if best.map_or(true, |b| d < b) {
            best = Some(d);
        }
    };
    if let (Point::Edge(e1, t1), Point::Edge(e2, t2)) = (p, q) {
        if e1 == e2 {
            offer(rational::abs(*t1 - t2));
        }
    }
    for (a, da) in p.anchors(g) {
        for (b, db) in q.anchors(g) {
            offer(da + rational::int(g.vertex_distance(a, b) as i128) + db);
        }
    }
    best.expect("graph is connected")
}

/// An ordered tuple of pairwise distinct points; token `i` sits at `points[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration(pub Vec<Point>);

impl Configuration {
    pub fn new(g: &Graph, points: Vec<Point>) -> Result<Self, GeometryError> {
        for p in &points {
            p.validate(g)?;
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(GeometryError::Collision(i, j));
                }
            }
        }
        Ok(Configuration(points))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn token_at(&self, p: &Point) -> Option<usize> {
        self.0.iter().position(|x| x == p)
    }

    pub fn occupies(&self, v: VertexId) -> Option<usize> {
        self.token_at(&Point::Vertex(v))
    }

    /// Interior tokens of `e` as `(param, token)`, sorted by parameter.
    pub fn tokens_on_edge(&self, e: EdgeId) -> Vec<(Q, usize)> {
        let mut out: Vec<(Q, usize)> = self
            .0
            .iter()
            .enumerate()
            .filter_map(|(i, p)| match p {
                Point::Edge(f, t) if *f == e => Some((*t, i)),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }
}

/// Open sub-interval `(lo, hi)` of an edge, in edge parameters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Piece {
    pub edge: EdgeId,
    pub lo: Q,
    pub hi: Q,
}

impl Piece {
    pub fn midpoint(&self) -> Point {
        Point::Edge(self.edge, (self.lo + self.hi) * half())
    }

    pub fn contains(&self, e: EdgeId, t: &Q) -> bool {
        self.edge == e && self.lo < *t && *t < self.hi
    }

    pub fn length(&self) -> Q {
        self.hi - self.lo
    }
}

/// A connected component of `G \ x` in canonical form: sorted pieces and the
/// sorted unoccupied vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub pieces: Vec<Piece>,
    pub vertices: Vec<VertexId>,
}

impl Component {
    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => self.vertices.binary_search(v).is_ok(),
            Point::Edge(e, t) => self.pieces.iter().any(|pc| pc.contains(*e, t)),
        }
    }

    /// An interval bounded by tokens: one piece and no vertex.
    pub fn is_interval(&self) -> bool {
        self.vertices.is_empty() && self.pieces.len() == 1
    }

    /// Some point inside the component.
    pub fn representative(&self) -> Point {
        match self.vertices.first() {
            Some(v) => Point::Vertex(*v),
            None => self.pieces[0].midpoint(),
        }
    }

    /// Whether `q` lies in the closure of the component.
    pub fn borders(&self, g: &Graph, q: &Point) -> bool {
        match q {
            Point::Vertex(v) => {
                self.vertices.binary_search(v).is_ok()
                    || self.pieces.iter().any(|pc| {
                        let e = g.edge(pc.edge);
                        (pc.lo == zero() && e.tail == *v) || (pc.hi == one() && e.head == *v)
                    })
            }
            Point::Edge(e, t) => self
                .pieces
                .iter()
                .any(|pc| pc.edge == *e && pc.lo <= *t && *t <= pc.hi),
        }
    }

    /// Whether the component together with `extra` (a point of its closure)
    /// contains no cycle.
    pub fn is_simply_connected(&self, g: &Graph, extra: Option<&Point>) -> Result<bool, GeometryError> {
        if let Some(x) = extra {
            if self.contains(x) || !self.borders(g, x) {
                return Err(GeometryError::NotBordering);
            }
        }
        let attached = |e: EdgeId, end: End, t: &Q| -> bool {
            let v = g.endpoint(e, end);
            let at_end = *t == end.param();
            match extra {
                Some(Point::Vertex(x)) if at_end && *x == v => true,
                Some(Point::Edge(f, s)) if *f == e && s == t => true,
                _ => at_end && self.vertices.binary_search(&v).is_ok(),
            }
        };
        let nodes = self.vertices.len() + extra.is_some() as usize;
        if nodes == 0 {
            return Ok(true);
        }
        let closed = self
            .pieces
            .iter()
            .filter(|pc| attached(pc.edge, End::Tail, &pc.lo) && attached(pc.edge, End::Head, &pc.hi))
            .count();
        Ok(closed + 1 == nodes)
    }
}

/// The components of `G \ x`, canonically ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complement {
    pub components: Vec<Component>,
}

impl Complement {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component containing `p`.
    pub fn component_of(&self, p: &Point) -> Result<usize, GeometryError> {
        self.components
            .iter()
            .position(|c| c.contains(p))
            .ok_or(GeometryError::Occupied)
    }

    pub fn index_of(&self, c: &Component) -> Option<usize> {
        self.components.iter().position(|x| x == c)
    }
}

/// Splits every edge at its tokens and joins the resulting open pieces through
/// unoccupied vertices.
pub fn complement_components(g: &Graph, x: &Configuration) -> Complement {
    let occupied: BTreeSet<VertexId> = x
        .points()
        .iter()
        .filter_map(|p| match p {
            Point::Vertex(v) => Some(*v),
            _ => None,
        })
        .collect();
    let mut pieces = Vec::new();
    for e in g.edge_ids() {
        let mut cuts = alloc::vec![zero()];
        cuts.extend(x.tokens_on_edge(e).into_iter().map(|(t, _)| t));
        cuts.push(one());
        for w in cuts.windows(2) {
            pieces.push(Piece { edge: e, lo: w[0], hi: w[1] });
        }
    }
    let nv = g.vertex_count();
    let mut uf = UnionFind::new(pieces.len() + nv);
    for (i, pc) in pieces.iter().enumerate() {
        let edge = g.edge(pc.edge);
        if pc.lo == zero() && !occupied.contains(&edge.tail) {
            uf.union(i, pieces.len() + edge.tail.0);
        }
        if pc.hi == one() && !occupied.contains(&edge.head) {
            uf.union(i, pieces.len() + edge.head.0);
        }
    }
    let (labels, k) = uf.labels();
    let mut comps: Vec<Component> = (0..k)
        .map(|_| Component {
            pieces: Vec::new(),
            vertices: Vec::new(),
        })
        .collect();
    for (i, pc) in pieces.into_iter().enumerate() {
        comps[labels[i]].pieces.push(pc);
    }
    let np = labels.len() - nv;
    for v in 0..nv {
        if !occupied.contains(&VertexId(v)) {
            comps[labels[np + v]].vertices.push(VertexId(v));
        }
    }
    // occupied vertices form singleton classes with no pieces; drop them
    comps.retain(|c| !c.pieces.is_empty() || !c.vertices.is_empty());
    for c in &mut comps {
        c.pieces.sort();
        c.vertices.sort();
    }
    comps.sort();
    Complement { components: comps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::q;
    use alloc::vec;

    fn cfg(g: &Graph, pts: Vec<Point>) -> Configuration {
        Configuration::new(g, pts).unwrap()
    }

    #[test]
    fn theta_tokens_on_both_vertices() {
        let g = catalog::theta();
        let x = cfg(&g, vec![Point::Vertex(VertexId(0)), Point::Vertex(VertexId(1))]);
        let c = complement_components(&g, &x);
        assert_eq!(c.len(), 3);
        assert!(c.components.iter().all(|c| c.is_interval()));
        let e2 = g.edge_by_name("e2").unwrap();
        let idx = c.component_of(&Point::Edge(e2, q(1, 3))).unwrap();
        assert_eq!(c.components[idx].pieces[0].edge, e2);
    }

    #[test]
    fn theta_one_interior_token() {
        let g = catalog::theta();
        let x = cfg(&g, vec![Point::Edge(EdgeId(0), q(1, 2))]);
        assert_eq!(complement_components(&g, &x).len(), 1);
    }

    #[test]
    fn star_center_token() {
        let g = catalog::star(3);
        let c0 = g.vertex_by_name("c").unwrap();
        let x = cfg(&g, vec![Point::Vertex(c0)]);
        let c = complement_components(&g, &x);
        assert_eq!(c.len(), 3);
        let e1 = g.edge_by_name("e1").unwrap();
        let i = c.component_of(&Point::Edge(e1, q(1, 2))).unwrap();
        assert!(c.components[i].pieces.iter().all(|p| p.edge == e1));
        assert!(c.components.iter().all(|k| k.borders(&g, &Point::Vertex(c0))));
        assert_eq!(c.component_of(&Point::Vertex(c0)), Err(GeometryError::Occupied));
    }

    #[test]
    fn borders_interval_ends() {
        let g = catalog::interval();
        let e = EdgeId(0);
        let x = cfg(&g, vec![Point::Edge(e, q(1, 4)), Point::Edge(e, q(3, 4))]);
        let c = complement_components(&g, &x);
        let mid = &c.components[c.component_of(&Point::Edge(e, q(1, 2))).unwrap()];
        assert!(mid.is_interval());
        assert!(mid.borders(&g, &Point::Edge(e, q(1, 4))));
        assert!(!mid.borders(&g, &Point::Vertex(VertexId(0))));
    }

    #[test]
    fn simple_connectivity() {
        let g = catalog::lollipop();
        let v = g.vertex_by_name("v").unwrap();
        let x = cfg(&g, vec![Point::Vertex(v)]);
        let c = complement_components(&g, &x);
        let l = g.edge_by_name("l").unwrap();
        let lc = &c.components[c.component_of(&Point::Edge(l, q(1, 2))).unwrap()];
        assert!(lc.is_simply_connected(&g, None).unwrap());
        assert!(!lc.is_simply_connected(&g, Some(&Point::Vertex(v))).unwrap());
        // star with a token on each leaf edge: the central piece is a tree
        let s = catalog::star(3);
        let pts = s.edge_ids().map(|e| Point::Edge(e, q(1, 2))).collect();
        let x = cfg(&s, pts);
        let c = complement_components(&s, &x);
        let center = &c.components[c.component_of(&Point::Vertex(VertexId(0))).unwrap()];
        assert!(center.is_simply_connected(&s, Some(&Point::Edge(EdgeId(0), q(1, 2)))).unwrap());
        // a theta minus one interior point still has a cycle
        let t = catalog::theta();
        let x = cfg(&t, vec![Point::Edge(EdgeId(0), q(1, 2))]);
        let c = complement_components(&t, &x);
        assert!(!c.components[0].is_simply_connected(&t, None).unwrap());
    }

    #[test]
    fn distances() {
        let t = catalog::theta();
        let d = shortest_distance(&t, &Point::Edge(EdgeId(0), q(1, 2)), &Point::Edge(EdgeId(1), q(1, 2)));
        assert_eq!(d, one());
        let c = catalog::circle();
        let d = shortest_distance(&c, &Point::Edge(EdgeId(0), q(1, 10)), &Point::Edge(EdgeId(0), q(9, 10)));
        assert_eq!(d, q(1, 5));
        let p = Point::Edge(EdgeId(0), q(1, 3));
        assert_eq!(shortest_distance(&c, &p, &p), zero());
    }

    #[test]
    fn configuration_rejects_collisions() {
        let g = catalog::interval();
        let p = Point::Edge(EdgeId(0), q(1, 2));
        assert_eq!(
            Configuration::new(&g, vec![p.clone(), p]).unwrap_err(),
            GeometryError::Collision(0, 1)
        );
        assert_eq!(
            Configuration::new(&g, vec![Point::Edge(EdgeId(0), one())]).unwrap_err(),
            GeometryError::ParameterOutOfRange
        );
    }
}
