//! Finite groups by multiplication table: construction of every group of order at
//! most 24, isomorphism testing, and identification of small stabiliser groups.

use crate::perm::Perm;
use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

/// A finite group on `0..n` with identity `0`.
#[derive(Clone, Debug)]
pub struct CayleyGroup {
    n: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    pub order: usize,
    /// Number of elements of each order.
    pub orders: Vec<(u32, usize)>,
    pub center: usize,
    pub derived: usize,
    pub classes: usize,
}

impl CayleyGroup {
    /// Panics unless `mul` is a group table with identity 0.
    pub fn from_table(n: usize, mul: Vec<u16>) -> Self {
        assert_eq!(mul.len(), n * n);
        let mut inv = vec![u16::MAX; n];
        for a in 0..n {
            assert_eq!(mul[a] as usize, a, "0 is not the identity");
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u16;
                }
            }
            assert!(inv[a] != u16::MAX, "not a group table");
        }
        CayleyGroup { n, mul, inv }
    }

    /// The group generated by `gens`, if its order is at most `limit`.
    pub fn from_perms(gens: &[Perm], limit: usize) -> Option<Self> {
        let degree = gens.first().map_or(0, |g| g.degree());
        let elems = crate::permgroup::enumerate_closure(degree, gens, limit)?;
        let index: HashMap<&Perm, u16> = elems.iter().enumerate().map(|(i, p)| (p, i as u16)).collect();
        let n = elems.len();
        let mut mul = vec![0u16; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i * n + j] = index[&a.mul(b)];
            }
        }
        Some(Self::from_table(n, mul))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }

    pub fn elem_order(&self, a: u16) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Right-regular permutation of `a`.
    pub fn regular_perm(&self, a: u16) -> Perm {
        Perm::from_images((0..self.n as u16).map(|x| self.mul(x, a) as u32).collect())
    }

    /// Subgroup generated by `gens`, as a membership mask.
    pub fn closure(&self, gens: &[u16]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0u16];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn closure_size(&self, gens: &[u16]) -> usize {
        self.closure(gens).iter().filter(|&&b| b).count()
    }

    pub fn center_order(&self) -> usize {
        (0..self.n as u16).filter(|&a| (0..self.n as u16).all(|b| self.mul(a, b) == self.mul(b, a))).count()
    }

    pub fn derived_order(&self) -> usize {
        let mut comms = Vec::new();
        let mut seen = vec![false; self.n];
        for a in 0..self.n as u16 {
            for b in 0..self.n as u16 {
                let c = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b));
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    comms.push(c);
                }
            }
        }
        self.closure_size(&comms)
    }

    pub fn conjugacy_classes(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut k = 0;
        for a in 0..self.n as u16 {
            if seen[a as usize] {
                continue;
            }
            k += 1;
            for g in 0..self.n as u16 {
                seen[self.mul(self.mul(self.inv(g), a), g) as usize] = true;
            }
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.center_order() == self.n
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
        for a in 0..self.n as u16 {
            *hist.entry(self.elem_order(a)).or_default() += 1;
        }
        Fingerprint {
            order: self.n,
            orders: hist.into_iter().collect(),
            center: self.center_order(),
            derived: self.derived_order(),
            classes: self.conjugacy_classes(),
        }
    }

    /// A small generating set, chosen greedily by subgroup growth.
    pub fn generating_set(&self) -> Vec<u16> {
        let mut gens: Vec<u16> = Vec::new();
        let mut size = 1;
        while size < self.n {
            let (best, bsize) = (1..self.n as u16)
                .map(|a| {
                    let mut g = gens.clone();
                    g.push(a);
                    (a, self.closure_size(&g))
                })
                .max_by_key(|&(a, s)| (s, std::cmp::Reverse(a)))
                .unwrap();
            gens.push(best);
            size = bsize;
        }
        gens
    }

    /// Extend `gens[i] ↦ imgs[i]` to a homomorphism on `⟨gens⟩`, if consistent.
    fn extend_hom(&self, other: &CayleyGroup, gens: &[u16], imgs: &[u16]) -> Option<Vec<u16>> {
        let mut map = vec![u16::MAX; self.n];
        map[0] = 0;
        let mut queue = vec![0u16];
        let mut qi = 0;
        while qi < queue.len() {
            let x = queue[qi];
            qi += 1;
            for (&g, &h) in gens.iter().zip(imgs) {
                let y = self.mul(x, g);
                let fy = other.mul(map[x as usize], h);
                match map[y as usize] {
                    u16::MAX => {
                        map[y as usize] = fy;
                        queue.push(y);
                    }
                    v if v != fy => return None,
                    _ => {}
                }
            }
        }
        Some(map)
    }

    /// All isomorphisms onto `other`, restricted to `gens`; calls `f` with each full map
    /// until it returns `true`.
    fn search_isos(&self, other: &CayleyGroup, gens: &[u16], f: &mut dyn FnMut(&[u16]) -> bool) -> bool {
        if self.n != other.n {
            return false;
        }
        let ords: Vec<u32> = gens.iter().map(|&g| self.elem_order(g)).collect();
        let mut by_order: HashMap<u32, Vec<u16>> = HashMap::new();
        for b in 0..other.n as u16 {
            by_order.entry(other.elem_order(b)).or_default().push(b);
        }
        let mut imgs = Vec::with_capacity(gens.len());
        fn rec(
            g: &CayleyGroup,
            o: &CayleyGroup,
            gens: &[u16],
            ords: &[u32],
            by_order: &HashMap<u32, Vec<u16>>,
            imgs: &mut Vec<u16>,
            f: &mut dyn FnMut(&[u16]) -> bool,
        ) -> bool {
            let k = imgs.len();
            if k == gens.len() {
                if let Some(map) = g.extend_hom(o, gens, imgs) {
                    let mut hit = vec![false; o.n];
                    for &v in &map {
                        if v == u16::MAX || hit[v as usize] {
                            return false;
                        }
                        hit[v as usize] = true;
                    }
                    return f(&map);
                }
                return false;
            }
            for &b in by_order.get(&ords[k]).map(|v| v.as_slice()).unwrap_or(&[]) {
                imgs.push(b);
                let ok = g.extend_hom(o, &gens[..=k], imgs).is_some()
                    && rec(g, o, gens, ords, by_order, imgs, f);
                imgs.pop();
                if ok {
                    return true;
                }
            }
            false
        }
        rec(self, other, gens, &ords, &by_order, &mut imgs, f)
    }

    pub fn is_isomorphic(&self, other: &CayleyGroup) -> bool {
        if self.n != other.n || self.fingerprint() != other.fingerprint() {
            return false;
        }
        let gens = self.generating_set();
        self.search_isos(other, &gens, &mut |_| true)
    }

    /// Every automorphism as an element map.
    pub fn automorphisms(&self) -> Vec<Vec<u16>> {
        let gens = self.generating_set();
        let mut out = Vec::new();
        self.search_isos(self, &gens, &mut |m| {
            out.push(m.to_vec());
            false
        });
        out
    }

    pub fn direct_product(&self, other: &CayleyGroup) -> CayleyGroup {
        let (n, m) = (self.n, other.n);
        let nm = n * m;
        let mut mul = vec![0u16; nm * nm];
        for a in 0..nm {
            for b in 0..nm {
                let x = self.mul((a / m) as u16, (b / m) as u16) as usize;
                let y = other.mul((a % m) as u16, (b % m) as u16) as usize;
                mul[a * nm + b] = (x * m + y) as u16;
            }
        }
        CayleyGroup::from_table(nm, mul)
    }

    /// `⟨N, t⟩` with `t⁻¹xt = φ(x)` and `tᵖ = z`; requires `φ(z) = z` and `φᵖ` equal
    /// to conjugation by `z`.
    pub fn cyclic_extension(&self, p: usize, phi: &[u16], z: u16) -> Option<CayleyGroup> {
        let m = self.n;
        if phi[z as usize] != z {
            return None;
        }
        let mut phip: Vec<u16> = (0..m as u16).collect();
        for _ in 0..p {
            phip = phip.iter().map(|&x| phi[x as usize]).collect();
        }
        if (0..m as u16).any(|x| phip[x as usize] != self.mul(self.mul(self.inv(z), x), z)) {
            return None;
        }
        let mut phi_inv = vec![0u16; m];
        for (x, &y) in phi.iter().enumerate() {
            phi_inv[y as usize] = x as u16;
        }
        // pows[i] = φ^{-i}
        let mut pows = vec![(0..m as u16).collect::<Vec<_>>()];
        for i in 1..p {
            let prev = &pows[i - 1];
            pows.push(prev.iter().map(|&x| phi_inv[x as usize]).collect());
        }
        let n = m * p;
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            let (x, i) = (a % m, a / m);
            for b in 0..n {
                let (y, j) = (b % m, b / m);
                let mut e = self.mul(x as u16, pows[i][y]);
                let mut k = i + j;
                if k >= p {
                    e = self.mul(e, z);
                    k -= p;
                }
                mul[a * n + b] = (k * m + e as usize) as u16;
            }
        }
        Some(CayleyGroup::from_table(n, mul))
    }
}

pub fn cyclic(n: usize) -> CayleyGroup {
    let mul = (0..n * n).map(|k| ((k / n + k % n) % n) as u16).collect();
    CayleyGroup::from_table(n, mul)
}

/// Dihedral group of order `2n`.
pub fn dihedral(n: usize) -> CayleyGroup {
    let r = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect());
    let s = Perm::from_images((0..n as u32).map(|i| (n as u32 - i) % n as u32).collect());
    if n <= 2 {
        return cyclic(2).direct_product(&cyclic(n));
    }
    CayleyGroup::from_perms(&[r, s], 2 * n).unwrap()
}

pub fn symmetric(n: usize) -> CayleyGroup {
    let c = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect());
    let t = Perm::from_cycles(n, &[&[0, 1]]);
    CayleyGroup::from_perms(&[c, t], 40320).unwrap()
}

pub fn alternating(n: usize) -> CayleyGroup {
    let gens: Vec<Perm> = (2..n as u32).map(|k| Perm::from_cycles(n, &[&[0, 1, k]])).collect();
    CayleyGroup::from_perms(&gens, 20160).unwrap()
}

/// Number of groups of each order up to 24.
pub const GROUP_COUNTS: [usize; 25] = [0, 1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15];

pub const MAX_LIBRARY_ORDER: usize = 24;

/// One representative of every isomorphism type of order `n ≤ 24`, built by cyclic
/// extensions of smaller groups (every group of order at most 24 is solvable).
pub fn groups_of_order(n: usize) -> &'static [CayleyGroup] {
    static LIB: OnceLock<Vec<Vec<CayleyGroup>>> = OnceLock::new();
    assert!((1..=MAX_LIBRARY_ORDER).contains(&n), "library covers orders 1..=24");
    &LIB.get_or_init(build_library)[n]
}

fn build_library() -> Vec<Vec<CayleyGroup>> {
    let mut lib: Vec<Vec<CayleyGroup>> = vec![vec![]; MAX_LIBRARY_ORDER + 1];
    lib[1].push(cyclic(1));
    for n in 2..=MAX_LIBRARY_ORDER {
        let mut found: Vec<(Fingerprint, CayleyGroup)> = Vec::new();
        for p in (2..=n).filter(|&p| n % p == 0 && (2..p).all(|d| p % d != 0)) {
            for base in lib[n / p].clone() {
                let auts = base.automorphisms();
                for phi in &auts {
                    for z in 0..base.order() as u16 {
                        if let Some(g) = base.cyclic_extension(p, phi, z) {
                            let fp = g.fingerprint();
                            if !found.iter().any(|(f, h)| *f == fp && g.is_isomorphic(h)) {
                                found.push((fp, g));
                            }
                        }
                    }
                }
            }
        }
        lib[n] = found.into_iter().map(|(_, g)| g).collect();
    }
    lib
}

struct Named {
    name: String,
    fp: Fingerprint,
    group: CayleyGroup,
}

fn named_catalog() -> &'static [Named] {
    static NAMED: OnceLock<Vec<Named>> = OnceLock::new();
    NAMED.get_or_init(|| {
        let c = cyclic;
        let d = dihedral;
        let v4 = c(2).direct_product(&c(2));
        let q8 = {
            // quaternion units as 4x4 signed permutations acting on ±1,±i,±j,±k
            let i = Perm::from_cycles(8, &[&[0, 2, 1, 3], &[4, 6, 5, 7]]);
            let j = Perm::from_cycles(8, &[&[0, 4, 1, 5], &[2, 7, 3, 6]]);
            CayleyGroup::from_perms(&[i, j], 8).unwrap()
        };
        let mut list: Vec<(String, CayleyGroup)> = vec![
            ("C1".into(), c(1)),
            ("C2".into(), c(2)),
            ("C3".into(), c(3)),
            ("C4".into(), c(4)),
            ("V4".into(), v4.clone()),
            ("C6".into(), c(6)),
            ("S3".into(), d(3)),
            ("C8".into(), c(8)),
            ("C2xC4".into(), c(2).direct_product(&c(4))),
            ("C2^3".into(), v4.direct_product(&c(2))),
            ("D4".into(), d(4)),
            ("Q8".into(), q8),
            ("C12".into(), c(12)),
            ("C2xC6".into(), c(2).direct_product(&c(6))),
            ("D6".into(), d(6)),
            ("A4".into(), alternating(4)),
            ("D8".into(), d(8)),
            ("D4xC2".into(), d(4).direct_product(&c(2))),
            ("C2^4".into(), v4.direct_product(&v4)),
            ("S4".into(), symmetric(4)),
            ("D12".into(), d(12)),
            ("C3xD4".into(), c(3).direct_product(&d(4))),
            (
                // D4 acting on C3 through its quotient by a Klein four-group
                "C3:D4".into(),
                CayleyGroup::from_perms(
                    &[
                        Perm::from_cycles(7, &[&[0, 1, 2]]),
                        Perm::from_cycles(7, &[&[1, 2], &[3, 4, 5, 6]]),
                        Perm::from_cycles(7, &[&[4, 6]]),
                    ],
                    24,
                )
                .unwrap(),
            ),
            ("D6xC2".into(), d(6).direct_product(&c(2))),
            ("A4xC2".into(), alternating(4).direct_product(&c(2))),
            ("S3xC4".into(), d(3).direct_product(&c(4))),
            ("S3xD4".into(), d(3).direct_product(&d(4))),
            ("S4xC2".into(), symmetric(4).direct_product(&c(2))),
            ("S3xS3".into(), d(3).direct_product(&d(3))),
            ("S3xC2^3".into(), d(3).direct_product(&v4).direct_product(&c(2))),
        ];
        for s in crate::catalog::catalog().specs() {
            if let Ok(f) = s.factors() {
                let pa = f.a.regular_perms();
                let pc: Vec<Perm> =
                    f.a.gens.iter().zip(&pa).filter(|(g, _)| s.c_gens.contains(g)).map(|(_, p)| p.clone()).collect();
                for (lbl, perms, order) in [("A", pa.clone(), f.a.order), ("B", f.b.regular_perms(), f.b.order), ("C", pc, f.c_in_a.len())] {
                    if order >= 16 {
                        list.push((format!("{}.{}", s.id, lbl), CayleyGroup::from_perms(&perms, order).unwrap()));
                    }
                }
            }
        }
        let mut out: Vec<Named> = Vec::new();
        for (name, group) in list {
            let fp = group.fingerprint();
            if !out.iter().any(|e| e.fp == fp && e.group.is_isomorphic(&group)) {
                out.push(Named { name, fp, group });
            }
        }
        out
    })
}

/// Name of `g` from the stabiliser catalog, or `unidentified(order=N)`.
pub fn identify(g: &CayleyGroup) -> String {
    let fp = g.fingerprint();
    for e in named_catalog() {
        if e.fp == fp && e.group.is_isomorphic(g) {
            return e.name.clone();
        }
    }
    format!("unidentified(order={})", g.order())
}
