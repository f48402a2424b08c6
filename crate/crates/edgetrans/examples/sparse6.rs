//! sparse6 encoding and decoding.
use edgetrans::graph::{random_cubic, CubicGraph};
use edgetrans::named;
use rand::SeedableRng;

fn main() {
    for (name, g) in [("K4", named::k4()), ("Petersen", named::petersen()), ("Heawood", named::heawood())] {
        let s = g.sparse6();
        let back = CubicGraph::from_sparse6(&s).unwrap();
        println!("{name:<9} {s}  round-trip edges equal: {}", back.edges() == g.edges());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let g = random_cubic(100, &mut rng);
    println!("random 100-vertex cubic graph: {}", g.sparse6());
}
