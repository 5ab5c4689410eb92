//! Built-in graphs: every graph the theory names, plus seeded random trees.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeSpec, Graph, GraphSpec};

fn build(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Graph {
    GraphSpec::new(vertices, edges)
        .build()
        .expect("catalog graphs are valid")
}

/// A single edge `u -- v`.
pub fn interval() -> Graph {
    build(&["u", "v"], &[("e", "u", "v")])
}

/// Star with center `c` and `k >= 3` leaves; edge `ei` points from `c` to `li`.
pub fn star(k: usize) -> Graph {
    assert!(k >= 3, "a star needs at least 3 leaves");
    let mut spec = GraphSpec {
        vertices: alloc::vec!["c".to_string()],
        edges: Vec::new(),
    };
    for i in 1..=k {
        spec.vertices.push(format!("l{i}"));
        spec.edges.push(EdgeSpec {
            name: format!("e{i}"),
            tail: "c".into(),
            head: format!("l{i}"),
        });
    }
    spec.build().unwrap()
}

pub fn circle() -> Graph {
    build(&["v"], &[("e", "v", "v")])
}

/// Loop `l` at `v` with a stem `s` from `v` to the free vertex `u`.
pub fn lollipop() -> Graph {
    build(&["v", "u"], &[("l", "v", "v"), ("s", "v", "u")])
}

/// Same shape as [`lollipop`].
pub fn balloon() -> Graph {
    lollipop()
}

pub fn theta() -> Graph {
    build(&["a", "b"], &[("e1", "a", "b"), ("e2", "a", "b"), ("e3", "a", "b")])
}

pub fn infinity() -> Graph {
    build(&["v"], &[("l1", "v", "v"), ("l2", "v", "v")])
}

pub fn dumbbell() -> Graph {
    build(&["a", "b"], &[("la", "a", "a"), ("lb", "b", "b"), ("m", "a", "b")])
}

/// `k >= 2` loops `c1..ck` on the single vertex `w`.
pub fn wedge_of_circles(k: usize) -> Graph {
    assert!(k >= 2, "use circle() for one loop");
    let mut spec = GraphSpec {
        vertices: alloc::vec!["w".to_string()],
        edges: Vec::new(),
    };
    for i in 1..=k {
        spec.edges.push(EdgeSpec {
            name: format!("c{i}"),
            tail: "w".into(),
            head: "w".into(),
        });
    }
    spec.build().unwrap()
}

/// `k >= 3` balloons glued at the free ends of their stems.
pub fn wedge_of_balloons(k: usize) -> Graph {
    assert!(k >= 3, "fewer than 3 balloons leaves a degree-2 center");
    let mut spec = GraphSpec {
        vertices: alloc::vec!["w".to_string()],
        edges: Vec::new(),
    };
    for i in 1..=k {
        let v = format!("v{i}");
        spec.vertices.push(v.clone());
        spec.edges.push(EdgeSpec {
            name: format!("s{i}"),
            tail: "w".into(),
            head: v.clone(),
        });
        spec.edges.push(EdgeSpec {
            name: format!("b{i}"),
            tail: v.clone(),
            head: v,
        });
    }
    spec.build().unwrap()
}

/// Random tree without degree-2 vertices: a 3-star whose leaves are
/// repeatedly split into 2 or 3 children, `splits` times.
pub fn random_tree(seed: u64, splits: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices: Vec<String> = alloc::vec!["r".into()];
    let mut edges: Vec<EdgeSpec> = Vec::new();
    let mut leaves: Vec<String> = Vec::new();
    let mut fresh = 0usize;
    let mut grow = |parent: &str, vertices: &mut Vec<String>, edges: &mut Vec<EdgeSpec>, leaves: &mut Vec<String>| {
        let child = format!("t{fresh}");
        edges.push(EdgeSpec {
            name: format!("f{fresh}"),
            tail: parent.to_string(),
            head: child.clone(),
        });
        fresh += 1;
        vertices.push(child.clone());
        leaves.push(child);
    };
    for _ in 0..3 {
        grow("r", &mut vertices, &mut edges, &mut leaves);
    }
    for _ in 0..splits {
        let i = rng.gen_range(0..leaves.len());
        let parent = leaves.swap_remove(i);
        let children = rng.gen_range(2..=3);
        for _ in 0..children {
            grow(&parent, &mut vertices, &mut edges, &mut leaves);
        }
    }
    GraphSpec { vertices, edges }.build().unwrap()
}

/// Named catalog graphs (random trees excluded).
pub fn all() -> Vec<(&'static str, Graph)> {
    alloc::vec![
        ("interval", interval()),
        ("star_3", star(3)),
        ("circle", circle()),
        ("lollipop", lollipop()),
        ("balloon", balloon()),
        ("theta", theta()),
        ("infinity", infinity()),
        ("dumbbell", dumbbell()),
        ("wedge_2", wedge_of_circles(2)),
        ("wedge_3", wedge_of_circles(3)),
        ("wedge_4", wedge_of_circles(4)),
        ("wedge_of_balloons_3", wedge_of_balloons(3)),
    ]
}

/// Looks up a catalog graph; `random_tree_<seed>` yields a two-split random tree.
pub fn by_name(name: &str) -> Option<Graph> {
    if let Some(seed) = name.strip_prefix("random_tree_") {
        return seed.parse().ok().map(|s| random_tree(s, 2));
    }
    match name {
        "star_4" => return Some(star(4)),
        "wedge_of_balloons_4" => return Some(wedge_of_balloons(4)),
        _ => {}
    }
    all().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees_are_trees_without_degree_two() {
        for seed in 0..20 {
            let g = random_tree(seed, 3);
            assert_eq!(g.euler_characteristic(), 1);
            assert!(g.vertices().all(|v| g.degree(v) != 2));
        }
    }

    #[test]
    fn lookup() {
        assert!(by_name("theta").is_some());
        assert!(by_name("random_tree_7").is_some());
        assert!(by_name("nope").is_none());
    }
}
