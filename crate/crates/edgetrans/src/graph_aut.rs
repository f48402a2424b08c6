//! Automorphism groups and canonical forms of cubic graphs by individualisation and
//! refinement. Automorphisms found at leaves prune later branches through the orbits
//! of the generators fixing the current individualised sequence.

use crate::graph::CubicGraph;
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use num_bigint::BigUint;

/// Ordered partition stored as a vertex order plus, for every vertex, the start of its cell.
#[derive(Clone)]
struct Partition {
    order: Vec<u32>,
    pos: Vec<u32>,
    /// `cell[v]` is the start position of the cell containing `v`.
    cell: Vec<u32>,
    /// `len[s]` is the length of the cell starting at `s` (garbage elsewhere).
    len: Vec<u32>,
}

impl Partition {
    fn from_colors(colors: &[u32]) -> (Partition, Vec<u32>) {
        let n = colors.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&v| (colors[v as usize], v));
        let mut p = Partition { order, pos: vec![0; n], cell: vec![0; n], len: vec![0; n] };
        let mut starts = Vec::new();
        let mut s = 0;
        while s < n {
            let c = colors[p.order[s] as usize];
            let mut e = s;
            while e < n && colors[p.order[e] as usize] == c {
                e += 1;
            }
            p.len[s] = (e - s) as u32;
            for i in s..e {
                p.cell[p.order[i] as usize] = s as u32;
            }
            starts.push(s as u32);
            s = e;
        }
        for (i, &v) in p.order.iter().enumerate() {
            p.pos[v as usize] = i as u32;
        }
        (p, starts)
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<u32> {
        let n = self.order.len();
        let mut best: Option<u32> = None;
        let mut s = 0;
        while s < n {
            let l = self.len[s];
            if l > 1 && best.is_none_or(|b| l < self.len[b as usize]) {
                best = Some(s as u32);
            }
            s += l as usize;
        }
        best
    }

    /// Splits `v` off the front of its cell; returns the start of the new singleton.
    fn individualize(&mut self, v: u32) -> u32 {
        let s = self.cell[v as usize];
        let first = self.order[s as usize];
        let pv = self.pos[v as usize];
        self.order.swap(s as usize, pv as usize);
        self.pos[first as usize] = pv;
        self.pos[v as usize] = s;
        let l = self.len[s as usize];
        self.len[s as usize] = 1;
        self.len[s as usize + 1] = l - 1;
        for i in s + 1..s + l {
            self.cell[self.order[i as usize] as usize] = s + 1;
        }
        s
    }

    /// Equitable refinement starting from the splitter cells in `queue`.
    fn refine(&mut self, g: &CubicGraph, mut queue: Vec<u32>, scratch: &mut Scratch) {
        let mut in_queue = std::mem::take(&mut scratch.in_queue);
        for &s in &queue {
            in_queue[s as usize] = true;
        }
        let mut qi = 0;
        while qi < queue.len() {
            let s = queue[qi] as usize;
            qi += 1;
            in_queue[s] = false;
            let l = self.len[s] as usize;
            let mut touched: Vec<u32> = Vec::new();
            for i in s..s + l {
                let v = self.order[i];
                for &u in g.neighbors(v) {
                    if scratch.count[u as usize] == 0 {
                        let c = self.cell[u as usize];
                        if !scratch.touched[c as usize] {
                            scratch.touched[c as usize] = true;
                            touched.push(c);
                        }
                        scratch.hit.push(u);
                    }
                    scratch.count[u as usize] += 1;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                scratch.touched[c as usize] = false;
                let cs = c as usize;
                let cl = self.len[cs] as usize;
                if cl == 1 {
                    continue;
                }
                let cells = &mut self.order[cs..cs + cl];
                cells.sort_by_key(|&v| (scratch.count[v as usize], v));
                let k0 = scratch.count[cells[0] as usize];
                if k0 == scratch.count[cells[cl - 1] as usize] {
                    continue;
                }
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut a = 0;
                while a < cl {
                    let k = scratch.count[cells[a] as usize];
                    let mut b = a;
                    while b < cl && scratch.count[cells[b] as usize] == k {
                        b += 1;
                    }
                    frags.push((cs + a, b - a));
                    a = b;
                }
                for &(fs, fl) in &frags {
                    self.len[fs] = fl as u32;
                    for i in fs..fs + fl {
                        let v = self.order[i];
                        self.cell[v as usize] = fs as u32;
                        self.pos[v as usize] = i as u32;
                    }
                }
                let largest = frags.iter().enumerate().max_by_key(|(i, f)| (f.1, usize::MAX - i)).unwrap().0;
                let keep_all = in_queue[cs];
                for (i, &(fs, _)) in frags.iter().enumerate() {
                    if (keep_all || i != largest) && !in_queue[fs] {
                        in_queue[fs] = true;
                        queue.push(fs as u32);
                    }
                }
            }
            for &u in &scratch.hit {
                scratch.count[u as usize] = 0;
            }
            scratch.hit.clear();
        }
        scratch.in_queue = in_queue;
    }
}

struct Scratch {
    count: Vec<u8>,
    touched: Vec<bool>,
    in_queue: Vec<bool>,
    hit: Vec<u32>,
}

/// Result of the canonical search.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// `relabeling[v]` is the canonical label of vertex `v`.
    pub relabeling: Vec<u32>,
    pub key: Vec<u8>,
    pub generators: Vec<Perm>,
    /// Individualised sequence of the first leaf; a base for the group.
    pub base: Vec<u32>,
}

impl CanonicalForm {
    pub fn group(&self, n: usize) -> PermGroup {
        PermGroup::new(n, self.generators.clone())
    }
}

struct Leaf {
    seq: Vec<u32>,
    /// Vertex at each canonical position.
    inv_lab: Vec<u32>,
    code: Vec<u32>,
}

struct Search<'a> {
    g: &'a CubicGraph,
    scratch: Scratch,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Perm>,
}

enum Flow {
    Continue,
    /// Unwind to the node at this depth and try its next child.
    JumpTo(usize),
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    fn leaf_code(&self, p: &Partition) -> Vec<u32> {
        let n = self.g.n();
        let mut code = Vec::with_capacity(3 * n);
        for &v in &p.order {
            let mut nb = self.g.neighbors(v).map(|u| p.pos[u as usize]);
            nb.sort_unstable();
            code.extend(nb);
        }
        code
    }

    fn record_aut(&mut self, from: &[u32], to: &[u32]) {
        // maps vertex from[i] to to[i]
        let n = from.len();
        let mut img = vec![0u32; n];
        for i in 0..n {
            img[from[i] as usize] = to[i];
        }
        let p = Perm::from_images(img);
        if !p.is_identity() && !self.gens.contains(&p) {
            self.gens.push(p);
        }
    }

    /// Orbit representatives test: is `w` minimal in its orbit under generators fixing `seq`?
    fn is_orbit_min(&self, seq: &[u32], cell: &[u32], w: u32) -> bool {
        let fixing: Vec<&Perm> = self.gens.iter().filter(|g| seq.iter().all(|&v| g.apply(v) == v)).collect();
        if fixing.is_empty() {
            return true;
        }
        let mut seen = std::collections::HashSet::from([w]);
        let mut stack = vec![w];
        while let Some(x) = stack.pop() {
            for g in &fixing {
                let y = g.apply(x);
                if y < w && cell.contains(&y) {
                    return false;
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        true
    }

    fn dfs(&mut self, p: &Partition, seq: &mut Vec<u32>) -> Flow {
        let depth = seq.len();
        let Some(t) = p.target_cell() else {
            return self.leaf(p, seq);
        };
        let t = t as usize;
        let mut cell: Vec<u32> = p.order[t..t + p.len[t] as usize].to_vec();
        cell.sort_unstable();
        for &w in &cell {
            if !self.is_orbit_min(seq, &cell, w) {
                continue;
            }
            let mut q = p.clone();
            let s = q.individualize(w);
            q.refine(self.g, vec![s], &mut self.scratch);
            seq.push(w);
            let flow = self.dfs(&q, seq);
            seq.pop();
            if let Flow::JumpTo(l) = flow {
                if l < depth {
                    return flow;
                }
            }
        }
        Flow::Continue
    }

    fn leaf(&mut self, p: &Partition, seq: &[u32]) -> Flow {
        let code = self.leaf_code(p);
        let leaf = Leaf { seq: seq.to_vec(), inv_lab: p.order.clone(), code };
        let Some(first) = &self.first else {
            self.first = Some(Leaf { seq: leaf.seq.clone(), inv_lab: leaf.inv_lab.clone(), code: leaf.code.clone() });
            self.best = Some(leaf);
            return Flow::Continue;
        };
        if first.code == leaf.code {
            let (from, to) = (leaf.inv_lab.clone(), first.inv_lab.clone());
            let l = common_prefix(&leaf.seq, &first.seq);
            self.record_aut(&from, &to);
            return Flow::JumpTo(l);
        }
        let best = self.best.as_ref().unwrap();
        match leaf.code.cmp(&best.code) {
            std::cmp::Ordering::Equal => {
                let (from, to) = (leaf.inv_lab.clone(), best.inv_lab.clone());
                let l = common_prefix(&leaf.seq, &best.seq);
                self.record_aut(&from, &to);
                Flow::JumpTo(l)
            }
            std::cmp::Ordering::Less => {
                self.best = Some(leaf);
                Flow::Continue
            }
            std::cmp::Ordering::Greater => Flow::Continue,
        }
    }
}

/// Canonical form of `g` with vertices initially coloured by `colors` (all equal when `None`).
pub fn canonical_form_colored(g: &CubicGraph, colors: Option<&[u32]>) -> CanonicalForm {
    let n = g.n();
    let zeros = vec![0u32; n];
    let (mut p, starts) = Partition::from_colors(colors.unwrap_or(&zeros));
    let mut s = Search {
        g,
        scratch: Scratch { count: vec![0; n], touched: vec![false; n], in_queue: vec![false; n], hit: Vec::new() },
        first: None,
        best: None,
        gens: Vec::new(),
    };
    if n > 0 {
        p.refine(g, starts, &mut s.scratch);
        s.dfs(&p, &mut Vec::new());
    }
    let (base, relabeling, code) = match (s.first, s.best) {
        (Some(f), Some(b)) => {
            let mut lab = vec![0u32; n];
            for (i, &v) in b.inv_lab.iter().enumerate() {
                lab[v as usize] = i as u32;
            }
            (f.seq, lab, b.code)
        }
        _ => (vec![], vec![], vec![]),
    };
    let mut key = Vec::with_capacity(4 + 4 * code.len());
    key.extend((n as u32).to_le_bytes());
    if let Some(c) = colors {
        let mut canon_col = vec![0u32; n];
        for v in 0..n {
            canon_col[relabeling[v] as usize] = c[v];
        }
        for x in canon_col {
            key.extend(x.to_le_bytes());
        }
    }
    for x in code {
        key.extend(x.to_le_bytes());
    }
    CanonicalForm { relabeling, key, generators: s.gens, base }
}

pub fn canonical_form(g: &CubicGraph) -> CanonicalForm {
    canonical_form_colored(g, None)
}

pub fn canonical_key(g: &CubicGraph) -> Vec<u8> {
    canonical_form(g).key
}

pub fn automorphism_group(g: &CubicGraph) -> PermGroup {
    canonical_form(g).group(g.n())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    ArcTransitive,
    Semisymmetric,
    Neither,
}

#[derive(Clone, Debug)]
pub struct Symmetry {
    pub kind: SymmetryKind,
    pub vertex_orbits: usize,
    pub edge_orbits: usize,
    pub arc_orbits: usize,
    pub aut_order: BigUint,
}

/// Orbit count of `grp` acting on the arcs of `g`.
pub fn arc_orbits(g: &CubicGraph, grp: &PermGroup) -> Vec<Vec<(u32, u32)>> {
    let n = g.n();
    let idx = |u: u32, v: u32| -> usize { 3 * u as usize + g.neighbors(u).iter().position(|&x| x == v).unwrap() };
    let mut seen = vec![false; 3 * n];
    let mut out = Vec::new();
    for u in 0..n as u32 {
        for &v in g.neighbors(u) {
            if seen[idx(u, v)] {
                continue;
            }
            seen[idx(u, v)] = true;
            let mut orb = vec![(u, v)];
            let mut k = 0;
            while k < orb.len() {
                let (a, b) = orb[k];
                for h in grp.generators() {
                    let (x, y) = (h.apply(a), h.apply(b));
                    if !seen[idx(x, y)] {
                        seen[idx(x, y)] = true;
                        orb.push((x, y));
                    }
                }
                k += 1;
            }
            out.push(orb);
        }
    }
    out
}

pub fn edge_orbit_count(g: &CubicGraph, grp: &PermGroup) -> usize {
    let arcs = arc_orbits(g, grp);
    // an edge orbit is one arc orbit closed under reversal, or a pair of mutually reversed ones
    let mut which = std::collections::HashMap::new();
    for (i, o) in arcs.iter().enumerate() {
        for &a in o {
            which.insert(a, i);
        }
    }
    let mut paired = 0;
    for (i, o) in arcs.iter().enumerate() {
        let (u, v) = o[0];
        if which[&(v, u)] != i {
            paired += 1;
        }
    }
    arcs.len() - paired / 2
}

pub fn symmetry_with(g: &CubicGraph, grp: &PermGroup) -> Symmetry {
    let vertex_orbits = grp.orbits(None).len();
    let arc_orbits = arc_orbits(g, grp).len();
    let edge_orbits = edge_orbit_count(g, grp);
    let kind = if arc_orbits == 1 {
        SymmetryKind::ArcTransitive
    } else if edge_orbits == 1 && vertex_orbits == 2 {
        SymmetryKind::Semisymmetric
    } else {
        SymmetryKind::Neither
    };
    Symmetry { kind, vertex_orbits, edge_orbits, arc_orbits, aut_order: grp.order() }
}

pub fn symmetry_kind(g: &CubicGraph) -> Symmetry {
    symmetry_with(g, &automorphism_group(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_cubic;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn k4() -> CubicGraph {
        CubicGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn k33() -> CubicGraph {
        let e: Vec<_> = (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect();
        CubicGraph::from_edges(6, &e).unwrap()
    }

    fn prism() -> CubicGraph {
        CubicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]).unwrap()
    }

    fn cube() -> CubicGraph {
        let e: Vec<_> = (0..8u32).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|(a, b)| a < b).collect();
        CubicGraph::from_edges(8, &e).unwrap()
    }

    fn order(g: &CubicGraph) -> u64 {
        automorphism_group(g).order_u64().unwrap()
    }

    #[test]
    fn small_groups() {
        assert_eq!(order(&k4()), 24);
        assert_eq!(order(&k33()), 72);
        assert_eq!(order(&prism()), 12);
        assert_eq!(order(&cube()), 48);
    }

    #[test]
    fn kinds() {
        assert_eq!(symmetry_kind(&k4()).kind, SymmetryKind::ArcTransitive);
        let s = symmetry_kind(&prism());
        assert_eq!((s.kind, s.edge_orbits), (SymmetryKind::Neither, 2));
        assert_ne!(canonical_key(&k33()), canonical_key(&prism()));
    }

    #[test]
    fn keys_survive_relabeling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [8, 12, 20, 40] {
            let g = random_cubic(n, &mut rng);
            let mut p: Vec<u32> = (0..n as u32).collect();
            p.shuffle(&mut rng);
            let h = g.relabel(&p);
            assert_eq!(canonical_key(&g), canonical_key(&h));
            assert_eq!(order(&g), order(&h));
        }
    }
}
