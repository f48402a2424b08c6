//! Regular elementary-abelian covers: the action of automorphisms on the first
//! homology mod p, invariant subspaces, derived (voltage) graphs and lift certificates.
//!
//! Homology is taken with respect to a BFS spanning tree; the fundamental cycle of a
//! cotree edge `(u, v)` with `u < v` runs down the tree to `u`, across to `v` and
//! back up. Coordinates are row vectors and automorphisms act on the right.

use crate::graph::CubicGraph;
use crate::graph_aut::automorphism_group;
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use num_bigint::BigUint;
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("a generator is not an automorphism of the base graph")]
    NotAutomorphism,
    #[error("voltages do not span F_p^d, so the cover is disconnected")]
    Disconnected,
    #[error("subspace is not invariant under the group")]
    NotInvariant,
    #[error("search budget exceeded")]
    Budget,
    #[error("p = {0} divides the group order")]
    PrimeDividesOrder(u32),
    #[error("no suitable invariant subspace of codimension {0}")]
    NoSubspace(usize),
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Dense matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub p: u32,
    pub data: Vec<u32>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize, p: u32) -> Mat {
        Mat { rows, cols, p, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, p: u32) -> Mat {
        let mut m = Mat::zero(n, n, p);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], p: u32) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat { rows: rows.len(), cols, p, data: rows.iter().flatten().map(|&x| x % p).collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let p = self.p as u64;
        let mut out = Mat::zero(self.rows, o.cols, self.p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * o.get(k, j) as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.rows, self.p)
    }

    /// Row-reduced echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, piv * m.cols + j);
            }
            let inv = inv_mod(m.get(r, c), p);
            for j in 0..m.cols {
                let v = (m.get(r, j) as u64 * inv as u64 % p as u64) as u32;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i != r && f != 0 {
                    for j in 0..m.cols {
                        let v = (m.get(i, j) as u64 + (p - f) as u64 * m.get(r, j) as u64) % p as u64;
                        m.set(i, j, v as u32);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : self · x = 0}`, as row vectors.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let (r, piv) = self.rref();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![0u32; self.cols];
                x[f] = 1;
                for (i, &pc) in piv.iter().enumerate() {
                    x[pc] = (p - r.get(i, f)) % p;
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Mat> {
        let n = self.rows;
        let mut aug = Mat::zero(n, 2 * n, self.p);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        let mut out = Mat::zero(n, n, self.p);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j));
            }
        }
        Some(out)
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut r, mut b, mut e) = (1u64, a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Spanning tree and cotree of a connected graph.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    /// Parent of every vertex in the BFS tree from 0 (`u32::MAX` at the root).
    pub parent: Vec<u32>,
    /// Cotree edges `(u, v)` with `u < v`; edge `i` is homology coordinate `i`.
    pub cotree: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), usize>,
}

impl HomologyBasis {
    pub fn new(g: &CubicGraph) -> HomologyBasis {
        let n = g.n();
        let mut parent = vec![u32::MAX; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut q = std::collections::VecDeque::from([0u32]);
        while let Some(v) = q.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    parent[u as usize] = v;
                    q.push_back(u);
                }
            }
        }
        let cotree: Vec<(u32, u32)> =
            g.edges().into_iter().filter(|&(u, v)| parent[u as usize] != v && parent[v as usize] != u).collect();
        let index = cotree.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        HomologyBasis { parent, cotree, index }
    }

    /// Betti number `|E| - |V| + 1`.
    pub fn beta(&self) -> usize {
        self.cotree.len()
    }

    /// Coordinate and sign of the arc `u -> v`, if it is a cotree arc.
    fn arc(&self, u: u32, v: u32) -> Option<(usize, bool)> {
        if u < v {
            self.index.get(&(u, v)).map(|&i| (i, true))
        } else {
            self.index.get(&(v, u)).map(|&i| (i, false))
        }
    }

    /// Tree path from the root to `v`.
    pub fn tree_path(&self, v: u32) -> Vec<u32> {
        let mut path = vec![v];
        let mut x = v;
        while self.parent[x as usize] != u32::MAX {
            x = self.parent[x as usize];
            path.push(x);
        }
        path.reverse();
        path
    }

    /// Homology class (mod p) of the walk through `vertices`.
    fn walk_class(&self, vertices: &[u32], p: u32, out: &mut [u32]) {
        for w in vertices.windows(2) {
            if let Some((i, pos)) = self.arc(w[0], w[1]) {
                out[i] = if pos { (out[i] + 1) % p } else { (out[i] + p - 1) % p };
            }
        }
    }

    /// `h(σ(T_v))` for every vertex `v`: classes of the images of the tree paths.
    fn image_path_classes(&self, sigma: &Perm, p: u32) -> Vec<Vec<u32>> {
        let n = self.parent.len();
        let mut out = vec![vec![0u32; self.beta()]; n];
        // accumulate along the tree so each path is walked once
        let order = {
            let mut o: Vec<u32> = (0..n as u32).collect();
            o.sort_by_key(|&v| self.tree_path(v).len());
            o
        };
        for &v in &order {
            let par = self.parent[v as usize];
            if par == u32::MAX {
                continue;
            }
            let mut c = out[par as usize].clone();
            self.walk_class(&[sigma.apply(par), sigma.apply(v)], p, &mut c);
            out[v as usize] = c;
        }
        out
    }
}

fn is_automorphism(g: &CubicGraph, s: &Perm) -> bool {
    s.degree() == g.n() && g.edges().iter().all(|&(u, v)| g.neighbors(s.apply(u)).contains(&s.apply(v)))
}

/// Matrix of `sigma` on H_1 mod p: row `i` is the image of fundamental cycle `i`.
pub fn homology_matrix(basis: &HomologyBasis, sigma: &Perm, p: u32) -> Mat {
    let b = basis.beta();
    let paths = basis.image_path_classes(sigma, p);
    let mut m = Mat::zero(b, b, p);
    for (i, &(u, v)) in basis.cotree.iter().enumerate() {
        let mut row = paths[u as usize].clone();
        basis.walk_class(&[sigma.apply(u), sigma.apply(v)], p, &mut row);
        for (x, y) in row.iter_mut().zip(&paths[v as usize]) {
            *x = (*x + p - y) % p;
        }
        for (j, x) in row.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m
}

/// One matrix per generator of `grp`.
pub fn homology_action(g: &CubicGraph, grp: &PermGroup, p: u32) -> Result<(HomologyBasis, Vec<Mat>), CoverError> {
    if !is_prime(p) {
        return Err(CoverError::NotPrime(p));
    }
    if !grp.generators().iter().all(|s| is_automorphism(g, s)) {
        return Err(CoverError::NotAutomorphism);
    }
    let basis = HomologyBasis::new(g);
    let mats = grp.generators().iter().map(|s| homology_matrix(&basis, s, p)).collect();
    Ok((basis, mats))
}

/// Whether `grp` acts faithfully on H_1 mod p, by checking every element; `None` above `limit` elements.
pub fn acts_faithfully(g: &CubicGraph, grp: &PermGroup, p: u32, limit: u64) -> Option<bool> {
    if grp.order() > BigUint::from(limit) {
        return None;
    }
    let basis = HomologyBasis::new(g);
    Some(grp.elements().iter().all(|e| e.is_identity() || !homology_matrix(&basis, e, p).is_identity()))
}

/// An invariant subspace `W` given by its annihilator: `W` is the common kernel of the
/// columns of `functionals` (a β×d matrix), so `H_1/W ≅ F_p^d` through `x ↦ x·functionals`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    pub functionals: Mat,
}

impl Subspace {
    pub fn codim(&self) -> usize {
        self.functionals.cols
    }

    /// Basis of `W` itself.
    pub fn basis(&self) -> Vec<Vec<u32>> {
        self.functionals.transpose().kernel()
    }

    /// Induced action on the quotient: `M·F = F·M̄`.
    pub fn quotient_action(&self, m: &Mat) -> Result<Mat, CoverError> {
        let f = &self.functionals;
        let mf = m.mul(f);
        let (_, piv) = f.transpose().rref();
        // rows `piv` of F form an invertible d×d block
        let pick = |x: &Mat| Mat::from_rows(&piv.iter().map(|&i| x.row(i).to_vec()).collect::<Vec<_>>(), x.p);
        let r = pick(f).inverse().ok_or(CoverError::Disconnected)?;
        let bar = r.mul(&pick(&mf));
        if f.mul(&bar) != mf {
            return Err(CoverError::NotInvariant);
        }
        Ok(bar)
    }
}

fn canonical_columns(cols: &[Vec<u32>], p: u32) -> Mat {
    let (r, piv) = Mat::from_rows(cols, p).rref();
    Mat::from_rows(&(0..piv.len()).map(|i| r.row(i).to_vec()).collect::<Vec<_>>(), p).transpose()
}

/// Projective points of the span of `basis`, up to `budget`.
fn lines_in(basis: &[Vec<u32>], p: u32, budget: usize, out: &mut Vec<Vec<u32>>) -> Result<(), CoverError> {
    let k = basis.len();
    if k == 0 {
        return Ok(());
    }
    let total = (p as u128).pow(k as u32);
    if total > budget as u128 * p as u128 {
        return Err(CoverError::Budget);
    }
    let len = basis[0].len();
    for code in 1..total as u64 {
        let mut coeffs = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            coeffs.push((c % p as u64) as u32);
            c /= p as u64;
        }
        // normalise: last nonzero coefficient is 1
        if *coeffs.iter().rev().find(|&&x| x != 0).unwrap() != 1 {
            continue;
        }
        let mut v = vec![0u32; len];
        for (b, &a) in basis.iter().zip(&coeffs) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = ((*x as u64 + a as u64 * *y as u64) % p as u64) as u32;
            }
        }
        out.push(v);
        if out.len() > budget {
            return Err(CoverError::Budget);
        }
    }
    Ok(())
}

/// All subspaces of codimension `codim` invariant under every matrix in `mats`.
///
/// Codimension-d invariant subspaces correspond to d-dimensional invariant subspaces
/// of the dual, spanned by common eigenvector-type functionals. Codimension 1 uses the
/// common eigenspaces directly; larger codimensions spin cyclic submodules of the
/// dual from every projective point and close them under sums.
pub fn invariant_subspaces(mats: &[Mat], beta: usize, p: u32, codim: usize, budget: usize) -> Result<Vec<Subspace>, CoverError> {
    if codim == 0 {
        return Ok(vec![Subspace { functionals: Mat::zero(beta, 0, p) }]);
    }
    if codim > beta {
        return Ok(vec![]);
    }
    let mut found: HashSet<Mat> = HashSet::new();
    if codim == 1 {
        // columns f with M f = λ f for every M, refining one matrix at a time
        let identity: Vec<Vec<u32>> = (0..beta).map(|i| (0..beta).map(|j| (i == j) as u32).collect()).collect();
        let mut spaces = Vec::new();
        common_eigenspaces(mats, identity, p, &mut spaces);
        for ker in spaces {
            let mut lines = Vec::new();
            lines_in(&ker, p, budget, &mut lines)?;
            for v in lines {
                found.insert(canonical_columns(&[v], p));
                if found.len() > budget {
                    return Err(CoverError::Budget);
                }
            }
        }
    } else {
        let total = (p as u128).pow(beta as u32);
        if total > budget as u128 {
            return Err(CoverError::Budget);
        }
        let mt: Vec<Mat> = mats.iter().map(|m| m.transpose()).collect();
        let all: Vec<Vec<u32>> = (0..beta).map(|i| (0..beta).map(|j| (i == j) as u32).collect()).collect();
        let mut points = Vec::new();
        lines_in(&all, p, budget, &mut points)?;
        let mut cyclic: HashSet<Mat> = HashSet::new();
        for v in points {
            let span = spin(&[v], &mt, p);
            if span.len() <= codim {
                cyclic.insert(canonical_columns(&span, p));
            }
        }
        let mut frontier: Vec<Mat> = cyclic.iter().cloned().collect();
        let mut seen: HashSet<Mat> = frontier.iter().cloned().collect();
        while let Some(s) = frontier.pop() {
            if s.cols == codim {
                found.insert(s.clone());
                continue;
            }
            for c in &cyclic {
                let cols: Vec<Vec<u32>> = s.transpose().data.chunks(beta).chain(c.transpose().data.chunks(beta)).map(|r| r.to_vec()).collect();
                let sum = canonical_columns(&cols, p);
                if sum.cols <= codim && seen.insert(sum.clone()) {
                    if seen.len() > budget {
                        return Err(CoverError::Budget);
                    }
                    frontier.push(sum);
                }
            }
        }
    }
    let mut out: Vec<Subspace> = found.into_iter().map(|functionals| Subspace { functionals }).collect();
    out.sort_by(|a, b| a.functionals.data.cmp(&b.functionals.data));
    Ok(out)
}

/// Maximal subspaces of `span` on which every matrix acts as a scalar.
fn common_eigenspaces(mats: &[Mat], span: Vec<Vec<u32>>, p: u32, out: &mut Vec<Vec<Vec<u32>>>) {
    let Some((m, rest)) = mats.split_first() else {
        out.push(span);
        return;
    };
    let s = Mat::from_rows(&span, p).transpose();
    let ms = m.mul(&s);
    for l in 1..p {
        // (M - λ) S c = 0
        let mut a = ms.clone();
        for i in 0..a.rows {
            for j in 0..a.cols {
                let v = (a.get(i, j) + p - (l as u64 * s.get(i, j) as u64 % p as u64) as u32) % p;
                a.set(i, j, v);
            }
        }
        let coeffs = a.kernel();
        if coeffs.is_empty() {
            continue;
        }
        let sub: Vec<Vec<u32>> = coeffs.iter().map(|c| Mat::from_rows(std::slice::from_ref(c), p).mul(&Mat::from_rows(&span, p)).data).collect();
        common_eigenspaces(rest, sub, p, out);
    }
}

/// Echelon basis of the smallest subspace containing `seed` and closed under `mats` (row action).
fn spin(seed: &[Vec<u32>], mats: &[Mat], p: u32) -> Vec<Vec<u32>> {
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut queue: Vec<Vec<u32>> = seed.to_vec();
    while let Some(v) = queue.pop() {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if Mat::from_rows(&trial, p).rank() > basis.len() {
            basis.push(v.clone());
            let row = Mat::from_rows(&[v], p);
            for m in mats {
                queue.push(row.mul(m).data);
            }
        }
    }
    let (r, piv) = Mat::from_rows(&basis, p).rref();
    (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
}

/// A regular cover with covering group `F_p^d` and the base automorphisms chosen to lift.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub base: CubicGraph,
    pub p: u32,
    pub d: usize,
    /// Voltage of each cotree arc `(u, v)`, `u < v`, indexed like [`HomologyBasis::cotree`].
    pub voltages: Vec<Vec<u32>>,
    /// Base automorphisms with their action on `F_p^d`.
    pub group: Vec<(Perm, Mat)>,
    pub unverified_maximality: bool,
}

impl CoverSpec {
    /// Cover obtained from a subspace invariant under `grp`.
    pub fn from_subspace(g: &CubicGraph, grp: &PermGroup, p: u32, w: &Subspace) -> Result<CoverSpec, CoverError> {
        let (basis, mats) = homology_action(g, grp, p)?;
        let f = &w.functionals;
        if f.rank() != f.cols {
            return Err(CoverError::Disconnected);
        }
        let voltages = (0..basis.beta()).map(|i| f.row(i).to_vec()).collect();
        let group = grp
            .generators()
            .iter()
            .zip(&mats)
            .map(|(s, m)| Ok((s.clone(), w.quotient_action(m)?)))
            .collect::<Result<Vec<_>, CoverError>>()?;
        Ok(CoverSpec { base: g.clone(), p, d: f.cols, voltages, group, unverified_maximality: false })
    }
}

/// Evidence that the derived graph is a regular cover to which the group lifts.
#[derive(Clone, Debug)]
pub struct LiftCertificate {
    /// One lift per entry of `CoverSpec::group`.
    pub lifts: Vec<Perm>,
    /// Translations by the unit vectors of `F_p^d`.
    pub covering_transformations: Vec<Perm>,
    pub ct_order: BigUint,
}

fn fibre_index(a: &[u32], p: u32) -> u32 {
    a.iter().rev().fold(0u32, |acc, &x| acc * p + x)
}

fn fibre_vector(mut k: u32, p: u32, d: usize) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let x = k % p;
            k /= p;
            x
        })
        .collect()
}

/// Builds the derived graph: vertex `(v, a)` is numbered `v·p^d + index(a)` and the arc
/// `u -> v` joins `(u, a)` to `(v, a + voltage)`. Lifts are verified on every vertex.
pub fn derived_cover(spec: &CoverSpec) -> Result<(CubicGraph, LiftCertificate), CoverError> {
    let g = &spec.base;
    let (p, d) = (spec.p, spec.d);
    let basis = HomologyBasis::new(g);
    let vm = Mat::from_rows(&spec.voltages, p);
    if d > 0 && (vm.cols != d || vm.rank() != d) {
        return Err(CoverError::Disconnected);
    }
    let fib = (p as usize).pow(d as u32);
    let n = g.n() * fib;
    let add = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(x, y)| (x + y) % p).collect() };
    let volt = |u: u32, v: u32| -> Vec<u32> {
        match basis.arc(u, v) {
            Some((i, true)) => spec.voltages[i].clone(),
            Some((i, false)) => spec.voltages[i].iter().map(|&x| (p - x) % p).collect(),
            None => vec![0; d],
        }
    };
    let mut edges = Vec::with_capacity(3 * n / 2);
    for (u, v) in g.edges() {
        let x = volt(u, v);
        for k in 0..fib as u32 {
            let a = fibre_vector(k, p, d);
            let b = add(&a, &x);
            edges.push((u * fib as u32 + k, v * fib as u32 + fibre_index(&b, p)));
        }
    }
    let cover = CubicGraph::from_edges(n, &edges).map_err(|_| CoverError::Disconnected)?;
    if !cover.is_connected() {
        return Err(CoverError::Disconnected);
    }
    // lifts: (v, a) -> (σv, a·M̄ + ξ(σ(T_v)))
    let mut lifts = Vec::new();
    for (sigma, mbar) in &spec.group {
        if !is_automorphism(g, sigma) {
            return Err(CoverError::NotAutomorphism);
        }
        let mut xi = vec![vec![0u32; d]; g.n()];
        for v in 0..g.n() as u32 {
            let path = basis.tree_path(v);
            let mut acc = vec![0u32; d];
            for w in path.windows(2) {
                acc = add(&acc, &volt(sigma.apply(w[0]), sigma.apply(w[1])));
            }
            xi[v as usize] = acc;
        }
        let mut img = vec![0u32; n];
        for v in 0..g.n() as u32 {
            for k in 0..fib as u32 {
                let a = fibre_vector(k, p, d);
                let am = if d == 0 { vec![] } else { Mat::from_rows(&[a], p).mul(mbar).data };
                let b = add(&am, &xi[v as usize]);
                img[(v * fib as u32 + k) as usize] = sigma.apply(v) * fib as u32 + fibre_index(&b, p);
            }
        }
        let lift = Perm::try_from_images(img).ok_or(CoverError::NotInvariant)?;
        if !is_automorphism(&cover, &lift) {
            return Err(CoverError::NotInvariant);
        }
        lifts.push(lift);
    }
    let mut cts = Vec::new();
    for j in 0..d {
        let mut e = vec![0u32; d];
        e[j] = 1;
        let img: Vec<u32> = (0..n as u32)
            .map(|x| {
                let (v, k) = (x / fib as u32, x % fib as u32);
                v * fib as u32 + fibre_index(&add(&fibre_vector(k, p, d), &e), p)
            })
            .collect();
        let t = Perm::from_images(img);
        debug_assert!(is_automorphism(&cover, &t));
        cts.push(t);
    }
    let ct = PermGroup::new(n, cts.clone());
    let ct_order = ct.order();
    Ok((cover, LiftCertificate { lifts, covering_transformations: cts, ct_order }))
}

/// Checks the projection identity `℘(x^lift) = ℘(x)^σ` on every vertex and that the
/// covering transformations fix every fibre and act regularly on it.
pub fn verify_certificate(spec: &CoverSpec, cover: &CubicGraph, cert: &LiftCertificate) -> bool {
    let fib = (spec.p as usize).pow(spec.d as u32) as u32;
    let proj = |x: u32| x / fib;
    let lifts_ok = spec.group.iter().zip(&cert.lifts).all(|((s, _), l)| {
        is_automorphism(cover, l) && (0..cover.n() as u32).all(|x| proj(l.apply(x)) == s.apply(proj(x)))
    });
    let ct = PermGroup::new(cover.n(), cert.covering_transformations.clone());
    let fibre_ok = cert.covering_transformations.iter().all(|t| is_automorphism(cover, t) && (0..cover.n() as u32).all(|x| proj(t.apply(x)) == proj(x)));
    let regular = ct.order() == BigUint::from(fib) && (0..spec.base.n() as u32).all(|v| ct.orbit(v * fib).len() == fib as usize);
    lifts_ok && fibre_ok && regular
}

/// Largest cover for which the full automorphism group is recomputed.
pub const MAX_VERIFIED_COVER: usize = 20_000;

/// A cover of `g` along which exactly the edge-transitive group `grp` lifts: a
/// `grp`-invariant subspace of codimension `d` whose stabiliser in Aut(g) is `grp`.
/// When the cover is small enough its full automorphism group is compared with
/// `|grp|·p^d`; otherwise the result is flagged.
pub fn make_strong_realization(g: &CubicGraph, grp: &PermGroup, p: u32, d: usize, budget: usize) -> Result<CoverSpec, CoverError> {
    if !is_prime(p) {
        return Err(CoverError::NotPrime(p));
    }
    let order = grp.order();
    if &order % BigUint::from(p) == BigUint::from(0u32) {
        return Err(CoverError::PrimeDividesOrder(p));
    }
    let aut = automorphism_group(g);
    let (basis, mats) = homology_action(g, grp, p)?;
    let candidates = invariant_subspaces(&mats, basis.beta(), p, d, budget)?;
    let stab_is_grp = |w: &Subspace| -> bool {
        if aut.order() == order {
            return true;
        }
        // the stabiliser of W contains grp; it is grp iff no Aut element outside grp fixes W
        aut.elements().iter().filter(|e| !grp.contains(e)).all(|e| {
            let m = homology_matrix(&basis, e, p);
            w.quotient_action(&m).is_err()
        })
    };
    for w in candidates {
        if !stab_is_grp(&w) {
            continue;
        }
        let mut spec = CoverSpec::from_subspace(g, grp, p, &w)?;
        let cover_n = g.n() * (p as usize).pow(d as u32);
        if cover_n <= MAX_VERIFIED_COVER {
            let (cover, _) = derived_cover(&spec)?;
            let full = automorphism_group(&cover).order();
            if full != &order * BigUint::from(p).pow(d as u32) {
                continue;
            }
        } else {
            spec.unverified_maximality = true;
        }
        return Ok(spec);
    }
    Err(CoverError::NoSubspace(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> CubicGraph {
        CubicGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn linear_algebra() {
        let m = Mat::from_rows(&[vec![1, 2], vec![3, 4]], 5);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(Mat::from_rows(&[vec![1, 2], vec![2, 4]], 5).rank(), 1);
        let k = Mat::from_rows(&[vec![1, 2, 0]], 7).kernel();
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn identity_action_has_all_hyperplanes() {
        for p in [3u32, 5] {
            let id = Mat::identity(2, p);
            let subs = invariant_subspaces(&[id], 2, p, 1, 1000).unwrap();
            assert_eq!(subs.len() as u32, p + 1);
        }
    }

    #[test]
    fn irreducible_plane_has_no_lines() {
        // rotation of order 3 over F_5 has no eigenvalue: x^2 + x + 1 is irreducible mod 5
        let r = Mat::from_rows(&[vec![0, 1], vec![4, 4]], 5);
        assert!(r.mul(&r).mul(&r).is_identity());
        assert!(invariant_subspaces(&[r], 2, 5, 1, 1000).unwrap().is_empty());
    }

    #[test]
    fn trivial_cover_is_base() {
        let g = k4();
        let spec = CoverSpec { base: g.clone(), p: 3, d: 0, voltages: vec![vec![]; 3], group: vec![], unverified_maximality: false };
        let (c, cert) = derived_cover(&spec).unwrap();
        assert_eq!(c, g);
        assert_eq!(cert.ct_order, BigUint::from(1u32));
    }

    #[test]
    fn full_homology_cover_of_k4() {
        let g = k4();
        let aut = automorphism_group(&g);
        let w = Subspace { functionals: Mat::identity(3, 3) };
        let spec = CoverSpec::from_subspace(&g, &aut, 3, &w).unwrap();
        let (c, cert) = derived_cover(&spec).unwrap();
        assert_eq!(c.n(), 108);
        assert_eq!(cert.ct_order, BigUint::from(27u32));
        assert!(verify_certificate(&spec, &c, &cert));
    }

    #[test]
    fn action_is_multiplicative() {
        let g = k4();
        let aut = automorphism_group(&g);
        let basis = HomologyBasis::new(&g);
        let el = aut.elements();
        for a in el.iter().take(8) {
            for b in el.iter().skip(5).take(8) {
                let lhs = homology_matrix(&basis, &a.mul(b), 5);
                let rhs = homology_matrix(&basis, a, 5).mul(&homology_matrix(&basis, b, 5));
                assert_eq!(lhs, rhs);
            }
        }
        assert_eq!(acts_faithfully(&g, &aut, 5, 1000), Some(true));
    }

    #[test]
    fn cage_triple_cover() {
        let g = crate::named::tutte_8_cage();
        let aut = automorphism_group(&g);
        let (b, mats) = homology_action(&g, &aut, 3).unwrap();
        assert_eq!(b.beta(), 16);
        let subs = invariant_subspaces(&mats, b.beta(), 3, 1, 10_000).unwrap();
        assert_eq!(subs.len(), 1);
        let spec = CoverSpec::from_subspace(&g, &aut, 3, &subs[0]).unwrap();
        let (c, cert) = derived_cover(&spec).unwrap();
        assert!(verify_certificate(&spec, &c, &cert));
        assert_eq!(c.n(), 90);
        assert_eq!(automorphism_group(&c).order_u64(), Some(4320));
        assert_eq!(crate::graph_aut::canonical_key(&c), crate::graph_aut::canonical_key(&crate::named::f090()));
    }

    #[test]
    fn realization_rejects_dividing_prime() {
        let g = crate::named::k33();
        let aut = automorphism_group(&g);
        assert_eq!(make_strong_realization(&g, &aut, 3, 1, 1000).unwrap_err(), CoverError::PrimeDividesOrder(3));
        assert_eq!(make_strong_realization(&g, &aut, 9, 1, 1000).unwrap_err(), CoverError::NotPrime(9));
    }
}
