//! Cubic graphs, the two coset-graph constructions, BFS invariants, hamilton cycles
//! and the sparse6 codec.

use crate::catalog::{AmalgamSpec, Kind};
use crate::coset_enum::CosetTable;
use crate::normal_search::NormalSubgroupRecord;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} does not have exactly three distinct neighbours")]
    NotCubic(u32),
    #[error("loop or repeated edge at vertex {0}")]
    NotSimple(u32),
    #[error("edge {0}-{1} is out of range")]
    OutOfRange(u32, u32),
    #[error("bipartition is violated by edge {0}-{1}")]
    BadBipartition(u32, u32),
    #[error("stabiliser {label} has order {got} in the quotient, expected {want}")]
    StabiliserCollapse { label: char, got: usize, want: usize },
    #[error("record does not match the amalgam kind")]
    WrongKind,
    #[error("sparse6: {0}")]
    Sparse6(String),
}

/// A simple 3-regular graph. Neighbour lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicGraph {
    adj: Vec<[u32; 3]>,
    bipartition: Option<Vec<bool>>,
}

impl CubicGraph {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut lists: Vec<Vec<u32>> = vec![Vec::with_capacity(3); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::OutOfRange(u, v));
            }
            if u == v {
                return Err(GraphError::NotSimple(u));
            }
            lists[u as usize].push(v);
            lists[v as usize].push(u);
        }
        let mut adj = Vec::with_capacity(n);
        for (v, mut l) in lists.into_iter().enumerate() {
            l.sort_unstable();
            if l.len() != 3 {
                return Err(GraphError::NotCubic(v as u32));
            }
            if l[0] == l[1] || l[1] == l[2] {
                return Err(GraphError::NotSimple(v as u32));
            }
            adj.push([l[0], l[1], l[2]]);
        }
        Ok(CubicGraph { adj, bipartition: None })
    }

    pub fn with_bipartition(mut self, side: Vec<bool>) -> Result<Self, GraphError> {
        assert_eq!(side.len(), self.n());
        for (u, v) in self.edges() {
            if side[u as usize] == side[v as usize] {
                return Err(GraphError::BadBipartition(u, v));
            }
        }
        self.bipartition = Some(side);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32; 3] {
        &self.adj[v as usize]
    }

    pub fn bipartition(&self) -> Option<&[bool]> {
        self.bipartition.as_deref()
    }

    /// Edges `(u, v)` with `u < v`, sorted by `(v, u)` as sparse6 emits them.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.n() * 3 / 2);
        for v in 0..self.n() as u32 {
            for &u in self.neighbors(v) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// The graph with vertex `v` renamed `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> CubicGraph {
        let mut adj = vec![[0u32; 3]; self.n()];
        for (v, nb) in self.adj.iter().enumerate() {
            let mut t = nb.map(|u| perm[u as usize]);
            t.sort_unstable();
            adj[perm[v] as usize] = t;
        }
        let bipartition = self.bipartition.as_ref().map(|s| {
            let mut out = vec![false; s.len()];
            for (v, &b) in s.iter().enumerate() {
                out[perm[v] as usize] = b;
            }
            out
        });
        CubicGraph { adj, bipartition }
    }

    pub fn bfs_distances(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        dist[src as usize] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u as usize] == u32::MAX {
                    dist[u as usize] = dist[v as usize] + 1;
                    q.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs_distances(0).iter().all(|&d| d != u32::MAX)
    }

    /// Two-colouring with vertex 0 on side `false`, if one exists.
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let mut col: Vec<Option<bool>> = vec![None; self.n()];
        for s in 0..self.n() {
            if col[s].is_some() {
                continue;
            }
            col[s] = Some(false);
            let mut stack = vec![s as u32];
            while let Some(v) = stack.pop() {
                let c = col[v as usize].unwrap();
                for &u in self.neighbors(v) {
                    match col[u as usize] {
                        None => {
                            col[u as usize] = Some(!c);
                            stack.push(u);
                        }
                        Some(d) if d == c => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(col.into_iter().map(|c| c.unwrap()).collect())
    }

    /// Length of a shortest cycle.
    pub fn girth(&self) -> u32 {
        let n = self.n();
        let mut best = u32::MAX;
        let mut dist = vec![u32::MAX; n];
        let mut parent = vec![u32::MAX; n];
        for s in 0..n as u32 {
            dist.fill(u32::MAX);
            parent.fill(u32::MAX);
            dist[s as usize] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                if 2 * dist[v as usize] + 1 >= best {
                    break;
                }
                for &u in self.neighbors(v) {
                    if u == parent[v as usize] {
                        continue;
                    }
                    if dist[u as usize] == u32::MAX {
                        dist[u as usize] = dist[v as usize] + 1;
                        parent[u as usize] = v;
                        q.push_back(u);
                    } else {
                        best = best.min(dist[u as usize] + dist[v as usize] + 1);
                    }
                }
            }
        }
        best
    }

    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0;
        for s in 0..self.n() as u32 {
            let d = self.bfs_distances(s);
            let m = *d.iter().max()?;
            if m == u32::MAX {
                return None;
            }
            best = best.max(m);
        }
        Some(best)
    }

    pub fn invariants(&self) -> Invariants {
        Invariants {
            girth: self.girth(),
            diameter: self.diameter(),
            bipartite: self.two_coloring().is_some(),
            connected: self.is_connected(),
        }
    }

    pub fn sparse6(&self) -> String {
        sparse6_encode(self.n(), &self.edges())
    }

    pub fn from_sparse6(s: &str) -> Result<CubicGraph, GraphError> {
        let (n, edges) = sparse6_decode(s)?;
        CubicGraph::from_edges(n, &edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub girth: u32,
    /// `None` for disconnected graphs.
    pub diameter: Option<u32>,
    pub bipartite: bool,
    pub connected: bool,
}

/// Uniform pairing-model cubic graph on `n` vertices (`n` even), retrying until simple.
pub fn random_cubic<R: Rng>(n: usize, rng: &mut R) -> CubicGraph {
    assert!(n >= 4 && n.is_multiple_of(2));
    let mut points: Vec<u32> = (0..3 * n as u32).collect();
    loop {
        points.shuffle(rng);
        let edges: Vec<(u32, u32)> = points.chunks(2).map(|p| (p[0] / 3, p[1] / 3)).collect();
        if let Ok(g) = CubicGraph::from_edges(n, &edges) {
            return g;
        }
    }
}

// ---------------------------------------------------------------------------
// coset graphs

/// Left cosets `qH` of the subgroup generated by `gens`, as orbits of right
/// multiplication in the regular table. Returns the coset id of every element.
fn left_cosets(t: &CosetTable, gens: &[usize], want: usize, label: char) -> Result<Vec<u32>, GraphError> {
    let m = t.len();
    let mut id = vec![u32::MAX; m];
    let mut next = 0u32;
    for s in 0..m {
        if id[s] != u32::MAX {
            continue;
        }
        id[s] = next;
        let mut stack = vec![s];
        let mut size = 1;
        while let Some(e) = stack.pop() {
            for &g in gens {
                let f = t.get(e, 2 * g) as usize;
                if id[f] == u32::MAX {
                    id[f] = next;
                    size += 1;
                    stack.push(f);
                }
            }
        }
        if size != want {
            return Err(GraphError::StabiliserCollapse { label, got: size, want });
        }
        next += 1;
    }
    Ok(id)
}

fn check_faithful(t: &CosetTable, spec: &AmalgamSpec) -> Result<(Vec<u32>, Vec<u32>), GraphError> {
    let a = left_cosets(t, &spec.a_gens, spec.stab.0, 'A')?;
    let b = left_cosets(t, &spec.b_gens, spec.stab.1, 'B')?;
    left_cosets(t, &spec.c_gens, spec.stab.2, 'C')?;
    Ok((a, b))
}

/// Renumbers vertex ids by first appearance along `order`.
fn first_appearance(ids: impl Iterator<Item = u32>, count: usize) -> Vec<u32> {
    let mut map = vec![u32::MAX; count];
    let mut next = 0;
    for i in ids {
        if map[i as usize] == u32::MAX {
            map[i as usize] = next;
            next += 1;
        }
    }
    map
}

/// Arc-transitive coset graph: vertices are cosets of A, the edge through `q` joins
/// `qA` and `qaA` for the generator `a` of B outside A.
pub fn coset_graph_at(rec: &NormalSubgroupRecord, spec: &AmalgamSpec) -> Result<CubicGraph, GraphError> {
    if spec.kind != Kind::ArcTransitive {
        return Err(GraphError::WrongKind);
    }
    let t = &rec.table;
    let (a_id, _) = check_faithful(t, spec)?;
    let flip = *spec.b_gens.iter().find(|g| !spec.a_gens.contains(g)).ok_or(GraphError::WrongKind)?;
    let nv = t.len() / spec.stab.0;
    let map = first_appearance(a_id.iter().copied(), nv);
    let mut edges = Vec::new();
    for q in 0..t.len() {
        let u = map[a_id[q] as usize];
        let v = map[a_id[t.get(q, 2 * flip) as usize] as usize];
        if u < v {
            edges.push((u, v));
        } else if u == v {
            return Err(GraphError::NotSimple(u));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    CubicGraph::from_edges(nv, &edges)
}

/// Semisymmetric coset graph: vertices are the cosets of A and of B, joined when
/// they intersect.
pub fn coset_graph_ss(rec: &NormalSubgroupRecord, spec: &AmalgamSpec) -> Result<CubicGraph, GraphError> {
    if spec.kind != Kind::Semisymmetric {
        return Err(GraphError::WrongKind);
    }
    let t = &rec.table;
    let (a_id, b_id) = check_faithful(t, spec)?;
    let half = t.len() / spec.stab.0;
    // A-cosets are ids 0..half, B-cosets half..2half
    let ids = (0..t.len()).flat_map(|q| [a_id[q], half as u32 + b_id[q]]);
    let map = first_appearance(ids, 2 * half);
    let mut edges: Vec<(u32, u32)> = (0..t.len())
        .map(|q| {
            let u = map[a_id[q] as usize];
            let v = map[half + b_id[q] as usize];
            (u.min(v), u.max(v))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut side = vec![false; 2 * half];
    for (k, &m) in map.iter().enumerate() {
        side[m as usize] = k >= half;
    }
    CubicGraph::from_edges(2 * half, &edges)?.with_bipartition(side)
}

pub fn coset_graph(rec: &NormalSubgroupRecord, spec: &AmalgamSpec) -> Result<CubicGraph, GraphError> {
    match spec.kind {
        Kind::ArcTransitive => coset_graph_at(rec, spec),
        Kind::Semisymmetric => coset_graph_ss(rec, spec),
    }
}

// ---------------------------------------------------------------------------
// hamilton cycles

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hamilton {
    /// Vertex sequence of a hamilton cycle starting at 0.
    Cycle(Vec<u32>),
    ProvenNone,
    BudgetExhausted,
}

impl Hamilton {
    pub fn label(&self) -> &'static str {
        match self {
            Hamilton::Cycle(_) => "yes",
            Hamilton::ProvenNone => "no",
            Hamilton::BudgetExhausted => "unknown",
        }
    }
}

/// Checks that `cycle` visits every vertex once along edges and closes up.
pub fn is_hamilton_cycle(g: &CubicGraph, cycle: &[u32]) -> bool {
    let n = g.n();
    if cycle.len() != n || n < 3 {
        return false;
    }
    let mut seen = vec![false; n];
    for (i, &v) in cycle.iter().enumerate() {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
        if !g.neighbors(v).contains(&cycle[(i + 1) % n]) {
            return false;
        }
    }
    true
}

struct HamSearch<'a> {
    g: &'a CubicGraph,
    on_path: Vec<bool>,
    /// Usable neighbours: off the path, the current end, or vertex 0.
    free_deg: Vec<u8>,
    path: Vec<u32>,
    nodes: u64,
    budget: u64,
}

impl HamSearch<'_> {
    fn dfs(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let n = self.g.n();
        let v = *self.path.last().unwrap();
        if self.path.len() == n {
            return Some(self.g.neighbors(v).contains(&0));
        }
        let mut cand: Vec<u32> = self.g.neighbors(v).iter().copied().filter(|&u| !self.on_path[u as usize]).collect();
        cand.sort_by_key(|&u| self.free_deg[u as usize]);
        for u in cand {
            self.on_path[u as usize] = true;
            self.path.push(u);
            let mut ok = true;
            if v != 0 {
                for &w in self.g.neighbors(v) {
                    self.free_deg[w as usize] -= 1;
                    if !self.on_path[w as usize] && self.free_deg[w as usize] < 2 {
                        ok = false;
                    }
                }
            }
            if ok {
                match self.dfs() {
                    Some(false) => {}
                    r => return r,
                }
            }
            if v != 0 {
                for &w in self.g.neighbors(v) {
                    self.free_deg[w as usize] += 1;
                }
            }
            self.path.pop();
            self.on_path[u as usize] = false;
        }
        Some(false)
    }
}

/// Exact search over paths from vertex 0; `budget` bounds the number of search nodes.
pub fn hamilton_cycle(g: &CubicGraph, budget: u64) -> Hamilton {
    let n = g.n();
    if n < 3 || !g.is_connected() {
        return Hamilton::ProvenNone;
    }
    let mut s = HamSearch { g, on_path: vec![false; n], free_deg: vec![3; n], path: vec![0], nodes: 0, budget };
    s.on_path[0] = true;
    match s.dfs() {
        Some(true) => Hamilton::Cycle(s.path),
        Some(false) => Hamilton::ProvenNone,
        None => Hamilton::BudgetExhausted,
    }
}

// ---------------------------------------------------------------------------
// sparse6

fn push_n(out: &mut Vec<u8>, n: usize) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for sh in [12, 6, 0] {
            out.push(((n >> sh) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for sh in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> sh) & 63) as u8 + 63);
        }
    }
}

/// Number of bits needed for `n - 1`.
fn width(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

struct BitWriter {
    out: Vec<u8>,
    acc: u8,
    used: u32,
}

impl BitWriter {
    fn put(&mut self, value: usize, bits: u32) {
        for i in (0..bits).rev() {
            self.acc = (self.acc << 1) | ((value >> i) & 1) as u8;
            self.used += 1;
            if self.used == 6 {
                self.out.push(self.acc + 63);
                self.acc = 0;
                self.used = 0;
            }
        }
    }
}

/// sparse6 string (with leading ':' and no newline) of a graph given by its edges.
/// Edges may come in any order; they are emitted sorted by larger endpoint.
pub fn sparse6_encode(n: usize, edges: &[(u32, u32)]) -> String {
    let mut es: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (a.max(b), a.min(b))).collect();
    es.sort_unstable();
    let k = width(n);
    let mut header = vec![b':'];
    push_n(&mut header, n);
    let mut w = BitWriter { out: header, acc: 0, used: 0 };
    let mut cur = 0u32;
    for &(v, u) in &es {
        if v == cur {
            w.put(0, 1);
            w.put(u as usize, k);
        } else if v == cur + 1 {
            w.put(1, 1);
            w.put(u as usize, k);
        } else {
            w.put(1, 1);
            w.put(v as usize, k);
            w.put(0, 1);
            w.put(u as usize, k);
        }
        cur = v;
    }
    if w.used > 0 {
        let pad = 6 - w.used;
        if k < 6 && n == 1 << k && cur as usize + 2 == n && pad > k {
            w.put(0, 1);
            w.put((1 << (pad - 1)) - 1, pad - 1);
        } else {
            w.put((1 << pad) - 1, pad);
        }
    }
    String::from_utf8(w.out).expect("ascii")
}

pub fn sparse6_decode(s: &str) -> Result<(usize, Vec<(u32, u32)>), GraphError> {
    let err = |m: &str| GraphError::Sparse6(m.to_string());
    let s = s.strip_suffix('\n').unwrap_or(s);
    let bytes = s.as_bytes().strip_prefix(b":").ok_or_else(|| err("missing ':' header"))?;
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(GraphError::Sparse6(format!("byte {b:#04x} out of range")));
    }
    let six = |i: usize| -> Result<usize, GraphError> { bytes.get(i).map(|&b| (b - 63) as usize).ok_or_else(|| err("truncated header")) };
    let (n, pos) = if bytes.first() != Some(&126) {
        (six(0)?, 1)
    } else if bytes.get(1) != Some(&126) {
        ((six(1)? << 12) | (six(2)? << 6) | six(3)?, 4)
    } else {
        let mut n = 0;
        for i in 2..8 {
            n = (n << 6) | six(i)?;
        }
        (n, 8)
    };
    let k = width(n);
    let total_bits = (bytes.len() - pos) * 6;
    let bit = |i: usize| -> usize { ((bytes[pos + i / 6] - 63) as usize >> (5 - i % 6)) & 1 };
    let mut edges = Vec::new();
    let mut v = 0usize;
    let mut i = 0;
    while i + 1 + k as usize <= total_bits {
        let b = bit(i);
        let mut x = 0;
        for j in 0..k as usize {
            x = (x << 1) | bit(i + 1 + j);
        }
        i += 1 + k as usize;
        if b == 1 {
            v += 1;
        }
        if v >= n || x >= n {
            // remaining bits are padding
            break;
        }
        if x > v {
            v = x;
        } else {
            edges.push((x as u32, v as u32));
        }
    }
    if total_bits - i >= 6 {
        return Err(err("trailing garbage"));
    }
    Ok((n, edges))
}
