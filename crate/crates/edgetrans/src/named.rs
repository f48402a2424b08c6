//! Small named cubic graphs used as fixtures and golden references.

use crate::graph::CubicGraph;

/// Hamiltonian cubic graph from LCF notation `[shifts]^repeats`.
pub fn lcf(shifts: &[i32], repeats: usize) -> CubicGraph {
    let n = shifts.len() * repeats;
    let mut edges: Vec<(u32, u32)> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
    for i in 0..n {
        let j = (i as i64 + shifts[i % shifts.len()] as i64).rem_euclid(n as i64) as usize;
        if i < j {
            edges.push((i as u32, j as u32));
        }
    }
    CubicGraph::from_edges(n, &edges).expect("LCF data describes a cubic graph")
}

pub fn k4() -> CubicGraph {
    lcf(&[2], 4)
}

pub fn k33() -> CubicGraph {
    lcf(&[3], 6)
}

pub fn cube() -> CubicGraph {
    lcf(&[3, -3], 4)
}

pub fn petersen() -> CubicGraph {
    let mut e = Vec::new();
    for i in 0..5u32 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((5 + i, 5 + (i + 2) % 5));
    }
    CubicGraph::from_edges(10, &e).unwrap()
}

pub fn heawood() -> CubicGraph {
    lcf(&[5, -5], 7)
}

pub fn mobius_kantor() -> CubicGraph {
    lcf(&[5, -5], 8)
}

pub fn pappus() -> CubicGraph {
    lcf(&[5, 7, -7, 7, -7, -5], 3)
}

pub fn dodecahedron() -> CubicGraph {
    lcf(&[10, 7, 4, -4, -7, 10, -4, 7, -7, 4], 2)
}

pub fn desargues() -> CubicGraph {
    lcf(&[5, -5, 9, -9], 5)
}

pub fn f026() -> CubicGraph {
    lcf(&[-7, 7], 13)
}

pub fn coxeter() -> CubicGraph {
    // a_i, b_i, c_i on 7-cycles with steps 1, 2, 3; d_i joined to all three
    let mut e = Vec::new();
    for i in 0..7u32 {
        let (a, b, c, d) = (i, 7 + i, 14 + i, 21 + i);
        e.push((a, (i + 1) % 7));
        e.push((b, 7 + (i + 2) % 7));
        e.push((c, 14 + (i + 3) % 7));
        e.extend([(d, a), (d, b), (d, c)]);
    }
    CubicGraph::from_edges(28, &e).unwrap()
}

pub fn tutte_8_cage() -> CubicGraph {
    lcf(&[-13, -9, 7, -7, 9, 13], 5)
}

pub fn gray() -> CubicGraph {
    lcf(&[-25, 7, -7, 13, -13, 25], 9)
}

pub fn tutte_12_cage() -> CubicGraph {
    lcf(&[17, 27, -13, -59, -35, 35, -11, 13, -53, 53, -27, 21, 57, 11, -21, -57, 59, -17], 7)
}

pub fn f090() -> CubicGraph {
    lcf(&[17, -9, 37, -37, 9, -17], 15)
}
