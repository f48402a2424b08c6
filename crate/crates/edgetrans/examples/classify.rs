//! Amalgam type, local s-arc transitivity and action type of some famous graphs.
use edgetrans::classifier::{action_type, classify, ACTION_TYPE_BUDGET};
use edgetrans::named;

fn main() {
    let graphs = [
        ("K4", named::k4()),
        ("K3,3", named::k33()),
        ("Petersen", named::petersen()),
        ("Heawood", named::heawood()),
        ("Moebius-Kantor", named::mobius_kantor()),
        ("dodecahedron", named::dodecahedron()),
        ("Coxeter", named::coxeter()),
        ("Tutte 8-cage", named::tutte_8_cage()),
        ("Gray", named::gray()),
    ];
    for (name, g) in graphs {
        let t = classify(&g).expect("edge-transitive");
        let act = action_type(&g, ACTION_TYPE_BUDGET).expect("action type");
        println!(
            "{name:<15} n={:<3} type={:<7} s={} |Aut|={:<5} action=({})",
            g.n(),
            t.class,
            t.local_s,
            t.group_order,
            act.classes.join(",")
        );
    }
}
