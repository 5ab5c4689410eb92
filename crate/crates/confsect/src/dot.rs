//! Graphviz export of the 1-skeleton of `K_n(G)`.

use std::fmt::Write;

use confsect_core::complex::Skeleton;
use confsect_core::graph::Graph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn skeleton_dot(g: &Graph, sk: &Skeleton) -> String {
    let mut out = String::from("graph skeleton {\n  node [shape=box, fontsize=10];\n");
    for c in 0..sk.component_count {
        writeln!(out, "  subgraph cluster_{c} {{").unwrap();
        for (i, f) in sk.nodes.iter().enumerate().filter(|(i, _)| sk.component[*i] == c) {
            let label = f.id(g);
            writeln!(out, "    n{i} [label={}];", quote(if label.is_empty() { "(empty)" } else { &label })).unwrap();
        }
        out.push_str("  }\n");
    }
    for e in &sk.edges {
        writeln!(out, "  n{} -- n{} [label={}];", e.minus, e.plus, quote(&e.face.id(g))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use confsect_core::catalog;
    use confsect_core::complex::one_skeleton;

    #[test]
    fn star_skeleton_is_a_path() {
        let g = catalog::star(3);
        let dot = skeleton_dot(&g, &one_skeleton(&g, 1).unwrap());
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert_eq!(dot.matches("[label=").count(), 7);
        assert!(dot.contains("\"c=1\""));
    }
}
