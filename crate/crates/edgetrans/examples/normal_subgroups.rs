//! Normal subgroups of small index in an amalgam, and the coset graphs they give.
//!
//! `cargo run --release --example normal_subgroups -- DjM3 720`
use edgetrans::catalog::catalog;
use edgetrans::coset_enum::enumerate;
use edgetrans::fpcore::Presentation;
use edgetrans::graph::coset_graph;
use edgetrans::graph_aut::symmetry_kind;
use edgetrans::normal_search::{search, SearchConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let class = args.next().unwrap_or_else(|| "DjM3".into());
    let max_index: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(720);
    let spec = catalog().get(&class).expect("known class");
    let pres = &spec.presentation;

    // coset enumeration on a finite group first: S4 = <a, b | a^2, b^3, (ab)^4>
    let mut s4 = Presentation::new(&["a", "b"]).unwrap();
    for r in ["a^2", "b^3", "(ab)^4"] {
        s4.add_relator(r).unwrap();
    }
    let b_sub = vec![s4.parse_word("b").unwrap()];
    println!("S4: |G| = {}, [G:<b>] = {}", enumerate(&s4, &[], 1000).unwrap().len(), enumerate(&s4, &b_sub, 1000).unwrap().len());

    let mut cfg = SearchConfig::new(max_index);
    cfg.seed = Some(spec.faithful_seed().expect("seed"));
    let out = search(pres, &cfg).expect("search runs");
    println!("normal subgroups of index <= {} (complete to {}), {} nodes", max_index, out.swept_to, out.nodes);
    for rec in &out.records {
        match coset_graph(rec, spec) {
            Ok(g) => {
                let sym = symmetry_kind(&g);
                println!("  index {:>5}  n={:>4}  {:?}  |Aut|={}  {}", rec.index, g.n(), sym.kind, sym.aut_order, g.sparse6());
            }
            Err(e) => println!("  index {:>5}  no graph: {e}", rec.index),
        }
    }
}
