//! How complement components are carried along basic paths and along edges of
//! the 1-skeleton.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{realize_vertex, OrientedEdge, Skeleton, SkeletonEdge};
use crate::geometry::{complement_components, Complement, Configuration, Point};
use crate::graph::{EdgeId, End, Graph};
use crate::rational::{half, int, one, zero, Q};

/// How a token travels during a Type I move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenPath {
    /// Does not move.
    Fixed,
    /// Moves inside one edge without touching its ends.
    Slide,
    /// Starts on the vertex at `end` of `edge` and moves into that edge.
    Leave { edge: EdgeId, end: End },
}

/// A path along which no token enters a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeOneMove {
    pub source: Configuration,
    pub target: Configuration,
    pub paths: Vec<TokenPath>,
}

/// Token `mover` runs straight to the head of `along`; everything else stays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeTwoMove {
    pub source: Configuration,
    pub mover: usize,
    pub along: OrientedEdge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasicMove {
    TypeI(TypeOneMove),
    TypeII(TypeTwoMove),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("token {0} enters a vertex")]
    EntersVertex(usize),
    #[error("token {0} does not follow its declared path")]
    BadPath(usize),
    #[error("tokens on edge {0} change order")]
    OrderChanged(usize),
    #[error("source and target have different token counts")]
    Arity,
    #[error("token {0} is not inside the edge it should move along")]
    NotOnEdge(usize),
    #[error("the destination vertex is occupied")]
    Occupied,
    #[error("token {0} blocks the way to the vertex")]
    Blocked(usize),
}

/// `rows[x]` lists the target components that source component `x` may become.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionRelation {
    pub source: Complement,
    pub target: Complement,
    pub rows: Vec<Vec<usize>>,
}

impl TransitionRelation {
    pub fn is_single_valued(&self) -> bool {
        self.rows.iter().all(|r| r.len() == 1)
    }

    /// `self` followed by `next`; `next.source` must equal `self.target`.
    pub fn then(&self, next: &TransitionRelation) -> TransitionRelation {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out: Vec<usize> = r.iter().flat_map(|&y| next.rows[y].iter().copied()).collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        TransitionRelation { source: self.source.clone(), target: next.target.clone(), rows }
    }
}

impl TypeOneMove {
    pub fn validate(&self, g: &Graph) -> Result<(), TransitionError> {
        let (src, tgt) = (self.source.points(), self.target.points());
        if src.len() != tgt.len() || src.len() != self.paths.len() {
            return Err(TransitionError::Arity);
        }
        // per edge: (source order key, target parameter)
        let mut lanes: Vec<Vec<(Q, Q)>> = vec![Vec::new(); g.edge_count()];
        for (i, path) in self.paths.iter().enumerate() {
            match (path, &src[i], &tgt[i]) {
                (TokenPath::Fixed, p, q) if p == q => {
                    if let Point::Edge(e, t) = p {
                        lanes[e.0].push((*t, *t));
                    }
                }
                (_, _, Point::Vertex(_)) => return Err(TransitionError::EntersVertex(i)),
                (TokenPath::Slide, Point::Edge(e, s), Point::Edge(f, t)) if e == f => {
                    lanes[e.0].push((*s, *t));
                }
                (TokenPath::Leave { edge, end }, Point::Vertex(v), Point::Edge(f, t))
                    if f == edge && g.endpoint(*edge, *end) == *v =>
                {
                    let key = match end {
                        End::Tail => int(-1),
                        End::Head => int(2),
                    };
                    lanes[edge.0].push((key, *t));
                }
                _ => return Err(TransitionError::BadPath(i)),
            }
        }
        for (e, lane) in lanes.iter_mut().enumerate() {
            lane.sort();
            if lane.windows(2).any(|w| w[0].1 >= w[1].1) {
                return Err(TransitionError::OrderChanged(e));
            }
        }
        Ok(())
    }

    /// New parameter of the component end at parameter `at` of `edge`, if the
    /// token bounding it stays on that end of the edge.
    fn tracked(&self, g: &Graph, edge: EdgeId, end: End, at: Q) -> Option<Q> {
        let boundary = if at == end.param() {
            Point::Vertex(g.endpoint(edge, end))
        } else {
            Point::Edge(edge, at)
        };
        let t = self.source.token_at(&boundary).expect("interval ends are tokens");
        match (self.paths[t], &self.target.points()[t]) {
            (TokenPath::Fixed, _) => Some(at),
            (TokenPath::Slide, Point::Edge(_, p)) => Some(*p),
            (TokenPath::Leave { edge: e, end: en }, Point::Edge(_, p)) if e == edge && en == end => Some(*p),
            _ => None,
        }
    }
}

pub fn type1_transition(g: &Graph, m: &TypeOneMove) -> Result<TransitionRelation, TransitionError> {
    m.validate(g)?;
    let source = complement_components(g, &m.source);
    let target = complement_components(g, &m.target);
    let rows = source
        .components
        .iter()
        .map(|c| {
            let p = if let Some(v) = c.vertices.first() {
                Point::Vertex(*v)
            } else {
                let pc = &c.pieces[0];
                let e = g.edge(pc.edge);
                match (
                    m.tracked(g, pc.edge, End::Tail, pc.lo),
                    m.tracked(g, pc.edge, End::Head, pc.hi),
                ) {
                    (Some(a), Some(b)) => Point::Edge(pc.edge, (a + b) * half()),
                    (None, _) => Point::Vertex(e.tail),
                    (_, None) => Point::Vertex(e.head),
                }
            };
            vec![target.component_of(&p).expect("tracked point is free")]
        })
        .collect();
    Ok(TransitionRelation { source, target, rows })
}

/// A point of the piece of `e` touching its `end`, in the complement of `x`.
fn near_end(x: &Configuration, e: EdgeId, end: End) -> Point {
    let on = x.tokens_on_edge(e);
    match end {
        End::Tail => Point::Edge(e, on.first().map_or(one(), |(t, _)| *t) * half()),
        End::Head => Point::Edge(e, (on.last().map_or(zero(), |(t, _)| *t) + one()) * half()),
    }
}

impl TypeTwoMove {
    pub fn target(&self, g: &Graph) -> Configuration {
        let mut pts = self.source.0.clone();
        pts[self.mover] = Point::Vertex(self.along.head(g));
        Configuration(pts)
    }

    pub fn validate(&self, g: &Graph) -> Result<Q, TransitionError> {
        let s = match &self.source.points()[self.mover] {
            Point::Edge(e, s) if *e == self.along.edge => *s,
            _ => return Err(TransitionError::NotOnEdge(self.mover)),
        };
        if self.source.occupies(self.along.head(g)).is_some() {
            return Err(TransitionError::Occupied);
        }
        for (t, i) in self.source.tokens_on_edge(self.along.edge) {
            if (self.along.is_positive() && t > s) || (!self.along.is_positive() && t < s) {
                return Err(TransitionError::Blocked(i));
            }
        }
        Ok(s)
    }
}

/// The component ahead (containing the vertex) may become any component
/// reached from the vertex through a branch other than the arrival one; the
/// component behind becomes the one holding the swept segment; the rest stay.
pub fn type2_transition(g: &Graph, m: &TypeTwoMove) -> Result<TransitionRelation, TransitionError> {
    let s = m.validate(g)?;
    let e = m.along.edge;
    let v = m.along.head(g);
    let target_cfg = m.target(g);
    let source = complement_components(g, &m.source);
    let target = complement_components(g, &target_cfg);
    let on = m.source.tokens_on_edge(e);
    let (behind_pt, swept_pt) = if m.along.is_positive() {
        let prev = on.iter().rev().find(|(t, _)| *t < s).map_or(zero(), |(t, _)| *t);
        ((prev + s) * half(), (s + one()) * half())
    } else {
        let next = on.iter().find(|(t, _)| *t > s).map_or(one(), |(t, _)| *t);
        ((s + next) * half(), s * half())
    };
    let behind = source.component_of(&Point::Edge(e, behind_pt)).expect("free");
    let ahead = source.component_of(&Point::Vertex(v)).expect("vertex is free");
    let came_from = target.component_of(&Point::Edge(e, swept_pt)).expect("free");
    let mut branches: Vec<usize> = g
        .ends_at(v)
        .iter()
        .filter(|&&(f, end)| !(f == e && end == m.along.toward))
        .map(|&(f, end)| target.component_of(&near_end(&target_cfg, f, end)).expect("free"))
        .collect();
    branches.sort_unstable();
    branches.dedup();
    let rows = (0..source.len())
        .map(|c| {
            if c == ahead {
                branches.clone()
            } else if c == behind {
                vec![came_from]
            } else {
                let rep = source.components[c].representative();
                vec![target.component_of(&rep).expect("untouched component")]
            }
        })
        .collect();
    Ok(TransitionRelation { source, target, rows })
}

pub fn transition(g: &Graph, m: &BasicMove) -> Result<TransitionRelation, TransitionError> {
    match m {
        BasicMove::TypeI(m) => type1_transition(g, m),
        BasicMove::TypeII(m) => type2_transition(g, m),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// From the face with the mover on its edge to the face with it on the vertex.
    IntoVertex,
    OutOfVertex,
}

/// Where the mover waits before the final approach: halfway between the last
/// other token on its edge (or the far end) and the vertex, in `realize(plus)`.
pub fn approach_parameter(plus: &Configuration, oe: OrientedEdge, mover: usize) -> Q {
    let others: Vec<Q> = plus
        .tokens_on_edge(oe.edge)
        .into_iter()
        .filter(|&(_, i)| i != mover)
        .map(|(t, _)| t)
        .collect();
    if oe.is_positive() {
        (others.last().copied().unwrap_or(zero()) + one()) * half()
    } else {
        others.first().copied().unwrap_or(one()) * half()
    }
}

fn respace(minus: &Configuration, plus: &Configuration, mover: usize, mover_at: Point, oe: OrientedEdge) -> TypeOneMove {
    let mut target = plus.0.clone();
    target[mover] = mover_at;
    let paths = minus
        .points()
        .iter()
        .zip(&target)
        .enumerate()
        .map(|(i, (p, q))| {
            if p == q {
                TokenPath::Fixed
            } else if i == mover && matches!(p, Point::Vertex(_)) {
                TokenPath::Leave { edge: oe.edge, end: oe.toward }
            } else {
                TokenPath::Slide
            }
        })
        .collect();
    TypeOneMove { source: minus.clone(), target: Configuration(target), paths }
}

/// Into-vertex relation with the mover's waiting point at parameter `wait`.
pub fn into_vertex_relation(g: &Graph, edge: &SkeletonEdge, minus: &Configuration, plus: &Configuration, wait: Q) -> TransitionRelation {
    let oe = edge.oriented;
    let first = respace(minus, plus, edge.mover, Point::Edge(oe.edge, wait), oe);
    let second = TypeTwoMove { source: first.target.clone(), mover: edge.mover, along: oe };
    let a = type1_transition(g, &first).expect("respacing is a Type I move");
    let b = type2_transition(g, &second).expect("final approach is a Type II move");
    a.then(&b)
}

pub fn skeleton_edge_relation(g: &Graph, sk: &Skeleton, edge: usize, direction: Direction) -> TransitionRelation {
    let se = &sk.edges[edge];
    let minus = realize_vertex(&sk.nodes[se.minus]).expect("node");
    let plus = realize_vertex(&sk.nodes[se.plus]).expect("node");
    match direction {
        Direction::IntoVertex => {
            let wait = approach_parameter(&plus, se.oriented, se.mover);
            into_vertex_relation(g, se, &minus, &plus, wait)
        }
        Direction::OutOfVertex => {
            let target_pt = minus.points()[se.mover].clone();
            let m = respace(&plus, &minus, se.mover, target_pt, se.oriented);
            type1_transition(g, &m).expect("leaving a vertex is a Type I move")
        }
    }
}

/// Every skeleton edge's relations, indexed like `sk.edges`; component indices
/// refer to `complements[node]`.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    pub complements: Vec<Complement>,
    pub forward: Vec<Vec<Vec<usize>>>,
    pub backward: Vec<Vec<usize>>,
}

impl TransitionTable {
    pub fn build(g: &Graph, sk: &Skeleton) -> TransitionTable {
        let complements = sk
            .nodes
            .iter()
            .map(|f| complement_components(g, &realize_vertex(f).expect("node")))
            .collect();
        let mut forward = Vec::with_capacity(sk.edges.len());
        let mut backward = Vec::with_capacity(sk.edges.len());
        for i in 0..sk.edges.len() {
            forward.push(skeleton_edge_relation(g, sk, i, Direction::IntoVertex).rows);
            let back = skeleton_edge_relation(g, sk, i, Direction::OutOfVertex);
            backward.push(back.rows.into_iter().map(|r| r[0]).collect());
        }
        TransitionTable { complements, forward, backward }
    }
}
