use confsect_core::catalog;
use confsect_core::verify::{oracle_agrees, random_configuration, random_point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn components_match_flood_fill_on_the_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, g) in catalog::all() {
        for _ in 0..1000 {
            let n = rng.gen_range(1..=4);
            let x = random_configuration(&g, n, &mut rng);
            let probes: Vec<_> = (0..20).map(|_| random_point(&g, &mut rng)).collect();
            assert!(oracle_agrees(&g, &x, &probes), "{name}: {x:?}");
        }
    }
}
