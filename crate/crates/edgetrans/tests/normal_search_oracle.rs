//! The backtracking normal-subgroup search against brute force over every group of
//! order at most 24.

use edgetrans::catalog::catalog;
use edgetrans::coset_enum::CosetTable;
use edgetrans::fpcore::Presentation;
use edgetrans::normal_search::{normal_subgroups, search, SearchConfig};
use edgetrans::smallgroups::{groups_of_order, CayleyGroup};
use std::collections::BTreeSet;

const K: usize = 24;

fn eval(q: &CayleyGroup, imgs: &[u16], cols: &[usize]) -> u16 {
    cols.iter().fold(0u16, |acc, &c| {
        let x = imgs[c / 2];
        q.mul(acc, if c % 2 == 0 { x } else { q.inv(x) })
    })
}

/// Kernels of all surjections onto groups of order `<= k`, as standardised tables.
fn oracle(p: &Presentation, k: usize) -> BTreeSet<(usize, Vec<u32>)> {
    let r = p.ngens();
    let rels: Vec<(usize, Vec<usize>)> = p
        .relators
        .iter()
        .map(|w| {
            let cols: Vec<usize> = w.letters().iter().map(|l| l.column()).collect();
            (w.max_gen().unwrap_or(0), cols)
        })
        .collect();
    let mut out = BTreeSet::new();
    for m in 1..=k {
        for q in groups_of_order(m) {
            let mut imgs = vec![0u16; r];
            assign(q, &rels, &mut imgs, 0, &mut |imgs| {
                let mask = q.closure(imgs);
                if mask.iter().all(|&b| b) {
                    let rows: Vec<Vec<u32>> = (0..m as u16)
                        .map(|e| {
                            imgs.iter().flat_map(|&g| [q.mul(e, g) as u32, q.mul(e, q.inv(g)) as u32]).collect()
                        })
                        .collect();
                    let t = CosetTable::from_rows(r, rows, vec![]).standardize();
                    out.insert((m, t.raw().to_vec()));
                }
            });
        }
    }
    out
}

fn assign(q: &CayleyGroup, rels: &[(usize, Vec<usize>)], imgs: &mut Vec<u16>, g: usize, f: &mut dyn FnMut(&[u16])) {
    if g == imgs.len() {
        f(imgs);
        return;
    }
    for x in 0..q.order() as u16 {
        imgs[g] = x;
        if rels.iter().filter(|(mg, _)| *mg == g).all(|(_, cols)| eval(q, imgs, cols) == 0) {
            assign(q, rels, imgs, g + 1, f);
        }
    }
}

fn searched(p: &Presentation, k: usize) -> BTreeSet<(usize, Vec<u32>)> {
    let recs = normal_subgroups(p, k).unwrap();
    for r in &recs {
        assert_eq!(r.quotient.order_u64(), Some(r.index as u64), "quotient is regular");
        assert!(r.table.validate(p));
    }
    let set: BTreeSet<_> = recs.iter().map(|r| (r.index, r.table.raw().to_vec())).collect();
    assert_eq!(set.len(), recs.len(), "records are distinct");
    set
}

#[test]
fn free_product_of_two_c3_has_four_index_three_kernels() {
    let mut p = Presentation::new(&["x", "y"]).unwrap();
    p.add_relator("x^3").unwrap();
    p.add_relator("y^3").unwrap();
    let o = oracle(&p, 3);
    assert_eq!(o.iter().filter(|(m, _)| *m == 3).count(), 4);
    assert_eq!(o, searched(&p, 3));
}

#[test]
fn g2_maps_onto_a4() {
    let g2 = catalog().get("G2").unwrap();
    let recs = normal_subgroups(&g2.presentation, 12).unwrap();
    let a4: Vec<_> = recs.iter().filter(|r| r.index == 12 && r.quotient.identify_small().unwrap() == "A4").collect();
    assert!(!a4.is_empty());
    let o = oracle(&g2.presentation, 12);
    for r in a4 {
        assert!(o.contains(&(12, r.table.raw().to_vec())));
    }
}

#[test]
fn every_catalog_presentation_matches_oracle() {
    for spec in catalog().specs() {
        let o = oracle(&spec.presentation, K);
        let s = searched(&spec.presentation, K);
        assert_eq!(o, s, "{}", spec.id);
    }
}

#[test]
fn results_are_prefix_closed() {
    let p = &catalog().get("DjM3").unwrap().presentation;
    let big = searched(p, 24);
    for k in [1, 6, 12, 18] {
        let small = searched(p, k);
        let cut: BTreeSet<_> = big.iter().filter(|(m, _)| *m <= k).cloned().collect();
        assert_eq!(small, cut);
    }
}

#[test]
fn parallel_search_is_deterministic() {
    let p = &catalog().get("G1^3").unwrap().presentation;
    let keys = |jobs| {
        let out = search(p, &SearchConfig { jobs, ..SearchConfig::new(48) }).unwrap();
        out.records.iter().map(|r| r.table.raw().to_vec()).collect::<Vec<_>>()
    };
    assert_eq!(keys(1), keys(4));
}
