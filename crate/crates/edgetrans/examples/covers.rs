//! Elementary-abelian regular covers from invariant subspaces of homology.
use edgetrans::classifier::{classify, edge_transitive_subgroups, ACTION_TYPE_BUDGET};
use edgetrans::covers::{derived_cover, homology_action, invariant_subspaces, make_strong_realization, verify_certificate, CoverSpec};
use edgetrans::graph_aut::automorphism_group;
use edgetrans::named;

fn main() {
    // Z_3 cover of the Tutte 8-cage
    let cage = named::tutte_8_cage();
    let aut = automorphism_group(&cage);
    let (basis, mats) = homology_action(&cage, &aut, 3).unwrap();
    let hyperplanes = invariant_subspaces(&mats, basis.beta(), 3, 1, 100_000).unwrap();
    println!("8-cage: beta={}, {} invariant hyperplane(s) mod 3", basis.beta(), hyperplanes.len());
    for w in &hyperplanes {
        let spec = CoverSpec::from_subspace(&cage, &aut, 3, w).unwrap();
        let (cover, cert) = derived_cover(&spec).unwrap();
        let t = classify(&cover).unwrap();
        println!("  cover n={} type={} certificate={}", cover.n(), t.class, verify_certificate(&spec, &cover, &cert));
    }

    // covers of K3,3 for each edge-transitive subgroup, mod 7
    let k33 = named::k33();
    let (subs, _) = edge_transitive_subgroups(&k33, &automorphism_group(&k33), ACTION_TYPE_BUDGET).unwrap();
    for (class, h) in &subs {
        let (basis, mats) = homology_action(&k33, h, 7).unwrap();
        let ws = invariant_subspaces(&mats, basis.beta(), 7, 1, 100_000).unwrap();
        println!("K3,3 under {class}: {} hyperplane(s) mod 7", ws.len());
    }

    // strong realization: the lift group is exactly the chosen subgroup
    let gray = named::gray();
    let (subs, _) = edge_transitive_subgroups(&gray, &automorphism_group(&gray), ACTION_TYPE_BUDGET).unwrap();
    let (class, h) = subs.iter().find(|(c, _)| c == "G1").unwrap();
    match make_strong_realization(&gray, h, 7, 1, 100_000) {
        Ok(spec) => {
            let (cover, _) = derived_cover(&spec).unwrap();
            println!("Gray under {class}, p=7: n={} type={}", cover.n(), classify(&cover).unwrap().class);
        }
        Err(e) => println!("Gray under {class}: {e}"),
    }
}
