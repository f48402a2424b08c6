//! Census of edge-transitive cubic graphs up to a given order.
//!
//! `cargo run --release --example census -- 60 [out_dir]`
use edgetrans::catalog::Kind;
use edgetrans::census::{run_census, CensusConfig, CensusKind};

fn main() {
    let mut args = std::env::args().skip(1);
    let max_order: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(60);
    let cfg = CensusConfig { max_order, ..Default::default() };
    let census = run_census(&cfg).expect("census runs");
    for r in &census.records {
        println!(
            "{:<10} {:<7} |Aut|={:<6} girth={:<2} diam={} ham={}",
            r.name(),
            r.class,
            r.aut_order,
            r.girth,
            r.diameter.map_or("inf".into(), |d| d.to_string()),
            r.hamiltonian
        );
    }
    for (kind, k) in [(CensusKind::Cat, Kind::ArcTransitive), (CensusKind::Css, Kind::Semisymmetric)] {
        println!("{}: {} graphs, complete to order {}", kind.label(), census.of_kind(kind).count(), census.certified_order(k));
    }
    if let Some(dir) = args.next() {
        census.write(std::path::Path::new(&dir)).expect("write census");
        println!("written to {dir}");
    }
}
