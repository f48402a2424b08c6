//! Invariant hyperplanes against brute force, and structural properties of derived covers.

use edgetrans::classifier::{classify, edge_transitive_subgroups};
use edgetrans::covers::*;
use edgetrans::graph::CubicGraph;
use edgetrans::graph_aut::automorphism_group;
use edgetrans::named;
use edgetrans::permgroup::PermGroup;
use proptest::prelude::*;

/// Every hyperplane `ker f` of F_p^β, tested for `M f ∈ ⟨f⟩` under each matrix.
fn brute_force_hyperplanes(mats: &[Mat], beta: usize, p: u32) -> usize {
    let mut count = 0;
    for code in 1..(p as u64).pow(beta as u32) {
        let f: Vec<u32> = (0..beta).map(|i| (code / (p as u64).pow(i as u32) % p as u64) as u32).collect();
        if *f.iter().rev().find(|&&x| x != 0).unwrap() != 1 {
            continue;
        }
        let col = Mat::from_rows(&f.iter().map(|&x| vec![x]).collect::<Vec<_>>(), p);
        let invariant = mats.iter().all(|m| {
            let img = m.mul(&col).data;
            Mat::from_rows(&[f.clone(), img], p).rank() == 1
        });
        count += invariant as usize;
    }
    count
}

fn subgroups(g: &CubicGraph) -> Vec<(String, PermGroup)> {
    edge_transitive_subgroups(g, &automorphism_group(g), 20_000).unwrap().0
}

#[test]
fn hyperplanes_match_brute_force() {
    for g in [named::k33(), named::petersen()] {
        for p in [5u32, 7] {
            for (class, h) in subgroups(&g) {
                let (basis, mats) = homology_action(&g, &h, p).unwrap();
                let fast = invariant_subspaces(&mats, basis.beta(), p, 1, 100_000).unwrap().len();
                assert_eq!(fast, brute_force_hyperplanes(&mats, basis.beta(), p), "n={} p={p} {class}", g.n());
            }
        }
    }
}

#[test]
fn k33_full_group_mod_5_has_no_hyperplane() {
    let g = named::k33();
    let aut = automorphism_group(&g);
    let (basis, mats) = homology_action(&g, &aut, 5).unwrap();
    assert_eq!(basis.beta(), 4);
    assert_eq!(brute_force_hyperplanes(&mats, 4, 5), 0);
    assert_eq!(acts_faithfully(&g, &aut, 5, 1000), Some(true));
}

#[test]
fn k33_dihedral_covers_mod_7() {
    let g = named::k33();
    let (_, h) = subgroups(&g).into_iter().find(|(c, _)| c == "DjM1").unwrap();
    let (basis, mats) = homology_action(&g, &h, 7).unwrap();
    let subs = invariant_subspaces(&mats, basis.beta(), 7, 1, 1000).unwrap();
    assert_eq!(subs.len(), 2);
    for w in &subs {
        let spec = CoverSpec::from_subspace(&g, &h, 7, w).unwrap();
        let (c, cert) = derived_cover(&spec).unwrap();
        assert!(verify_certificate(&spec, &c, &cert));
        assert_eq!(c.n(), 42);
        assert_eq!(automorphism_group(&c).order_u64(), Some(126));
        assert_eq!(classify(&c).unwrap().class, "DjM1");
    }
}

#[test]
fn gray_realization_of_smallest_subgroup() {
    let g = named::gray();
    let (_, h) = subgroups(&g).into_iter().find(|(c, _)| c == "G1").unwrap();
    let spec = make_strong_realization(&g, &h, 7, 1, 10_000).unwrap();
    assert!(!spec.unverified_maximality);
    let (c, cert) = derived_cover(&spec).unwrap();
    assert!(verify_certificate(&spec, &c, &cert));
    assert_eq!(c.n(), 378);
    assert_eq!(automorphism_group(&c).order_u64(), Some(567));
    assert_eq!(classify(&c).unwrap().class, "G1");
}

#[test]
fn gray_full_group_has_no_small_hyperplane() {
    let g = named::gray();
    let aut = automorphism_group(&g);
    for p in [5u32, 7, 11, 13] {
        let (basis, mats) = homology_action(&g, &aut, p).unwrap();
        assert!(invariant_subspaces(&mats, basis.beta(), p, 1, 100_000).unwrap().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homology_action_is_multiplicative(i in 0usize..1440, j in 0usize..1440, p in prop::sample::select(vec![3u32, 5, 7])) {
        let g = named::tutte_8_cage();
        let elems = automorphism_group(&g).elements();
        let basis = HomologyBasis::new(&g);
        let (a, b) = (&elems[i], &elems[j]);
        prop_assert_eq!(
            homology_matrix(&basis, &a.mul(b), p),
            homology_matrix(&basis, a, p).mul(&homology_matrix(&basis, b, p))
        );
    }

    #[test]
    fn random_voltages_give_regular_covers(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5]), d in 1usize..3) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = named::petersen();
        let beta = HomologyBasis::new(&g).beta();
        let voltages: Vec<Vec<u32>> = (0..beta).map(|_| (0..d).map(|_| rng.gen_range(0..p)).collect()).collect();
        let spec = CoverSpec { base: g.clone(), p, d, voltages: voltages.clone(), group: vec![], unverified_maximality: false };
        match derived_cover(&spec) {
            Ok((c, cert)) => {
                prop_assert_eq!(c.n(), 10 * (p as usize).pow(d as u32));
                prop_assert!(c.is_connected());
                prop_assert!(verify_certificate(&spec, &c, &cert));
            }
            Err(e) => {
                prop_assert_eq!(e, CoverError::Disconnected);
                prop_assert!(Mat::from_rows(&voltages, p).rank() < d);
            }
        }
    }
}
