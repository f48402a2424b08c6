//! Canonical labelling: isomorphism testing and automorphism groups.
use edgetrans::graph::random_cubic;
use edgetrans::graph_aut::{automorphism_group, canonical_form, canonical_key};
use edgetrans::named;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let gray = named::gray();
    let mut perm: Vec<u32> = (0..gray.n() as u32).collect();
    perm.shuffle(&mut rng);
    let shuffled = gray.relabel(&perm);
    println!("Gray vs shuffled Gray isomorphic: {}", canonical_key(&gray) == canonical_key(&shuffled));

    let cf = canonical_form(&gray);
    println!("Gray: {} generators, base length {}, |Aut|={}", cf.generators.len(), cf.base.len(), automorphism_group(&gray).order());

    let (a, b) = (named::desargues(), named::dodecahedron());
    println!("Desargues vs dodecahedron isomorphic: {}", canonical_key(&a) == canonical_key(&b));

    let r = random_cubic(200, &mut rng);
    println!("random 200-vertex cubic graph: |Aut|={}", automorphism_group(&r).order());
}
