use confsect_core::catalog;
use confsect_core::complex::{all_faces, boundary, complex_stats, one_skeleton, realize_vertex};
use confsect_core::graph::Graph;
use confsect_core::verify::brute_force_face_counts;

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

fn catalog_without_circle() -> Vec<(&'static str, Graph)> {
    catalog::all().into_iter().filter(|(name, _)| *name != "circle").collect()
}

#[test]
fn golden_counts() {
    assert_eq!(brute_force_face_counts(&catalog::theta(), 1), vec![5, 6]);
    assert_eq!(brute_force_face_counts(&catalog::star(3), 1), vec![4, 3]);
    assert_eq!(brute_force_face_counts(&catalog::theta(), 2), vec![26, 48, 18]);
    assert_eq!(brute_force_face_counts(&catalog::theta(), 3)[0], 150);
    assert_eq!(complex_stats(&catalog::theta(), 2).unwrap().cells_per_dim, vec![26, 48, 18]);
    assert_eq!(complex_stats(&catalog::theta(), 3).unwrap().cells_per_dim[0], 150);
}

#[test]
fn enumeration_matches_brute_force() {
    for (name, g) in catalog_without_circle() {
        for n in 1..=3 {
            let stats = complex_stats(&g, n).unwrap();
            assert_eq!(stats.cells_per_dim, brute_force_face_counts(&g, n), "{name} n={n}");
            let alt: i64 = stats.cells_per_dim.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
            assert_eq!(stats.euler, alt);
            assert!(stats.dim <= n.min(g.branched_vertices().count()));
        }
    }
}

#[test]
fn first_complex_has_the_graph_euler_characteristic() {
    for (name, g) in catalog_without_circle() {
        assert_eq!(complex_stats(&g, 1).unwrap().euler, g.euler_characteristic(), "{name}");
    }
    for seed in 0..10 {
        let g = catalog::random_tree(seed, 3);
        assert_eq!(complex_stats(&g, 1).unwrap().euler, 1);
    }
}

#[test]
fn counts_are_divisible_by_relabelings() {
    for (name, g) in catalog_without_circle() {
        for n in 2..=3 {
            for c in complex_stats(&g, n).unwrap().cells_per_dim {
                assert_eq!(c % factorial(n), 0, "{name} n={n}");
            }
        }
    }
}

#[test]
fn boundaries_differ_only_in_the_mover() {
    for (name, g) in catalog_without_circle() {
        for n in 1..=2 {
            let faces = all_faces(&g, n).unwrap();
            let Some(ones) = faces.get(1) else { continue };
            for f in ones {
                let (oe, mover) = f.movers[0];
                let (plus, minus) = boundary(&g, f, oe).unwrap();
                assert_ne!(plus, minus);
                let (a, b) = (realize_vertex(&plus).unwrap(), realize_vertex(&minus).unwrap());
                for j in 0..n {
                    if j != mover && a.points()[j] != b.points()[j] {
                        // only respacing on the mover's own edge may move others
                        assert!(matches!(&a.points()[j], confsect_core::Point::Edge(e, _) if *e == oe.edge), "{name}");
                    }
                }
                assert_ne!(a.points()[mover], b.points()[mover]);
            }
        }
    }
}

#[test]
fn skeleton_examples() {
    let sk = one_skeleton(&catalog::interval(), 2).unwrap();
    assert_eq!((sk.nodes.len(), sk.edges.len(), sk.component_count), (2, 0, 2));
    let sk = one_skeleton(&catalog::star(3), 1).unwrap();
    assert_eq!((sk.nodes.len(), sk.edges.len(), sk.component_count), (4, 3, 1));
    assert_eq!(one_skeleton(&catalog::theta(), 3).unwrap().nodes.len(), 150);
    assert_eq!(complex_stats(&catalog::star(3), 2).unwrap().dim, 1);
}
