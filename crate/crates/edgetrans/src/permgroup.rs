//! Permutation groups with an exact stabiliser chain.
//!
//! The chain is built by a seeded random Schreier–Sims pass and then certified
//! by sifting every Schreier generator, so the result is exact and repeatable.

use crate::perm::Perm;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

const NONE: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// Indices into `StabChain::strong` of generators fixing earlier base points.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    /// Schreier vector: strong-generator index whose application reached the point.
    label: Vec<u32>,
}

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    strong: Vec<Perm>,
    strong_inv: Vec<Perm>,
    levels: Vec<Level>,
}

impl StabChain {
    fn new(degree: usize, prefix: &[u32]) -> Self {
        let levels = prefix
            .iter()
            .map(|&b| Level { base: b, gens: vec![], orbit: vec![b], label: root_label(degree, b) })
            .collect();
        StabChain { degree, strong: vec![], strong_inv: vec![], levels }
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    /// Strong generators fixing the first `depth` base points.
    pub fn level_generators(&self, depth: usize) -> Vec<Perm> {
        match self.levels.get(depth) {
            Some(l) => l.gens.iter().map(|&k| self.strong[k].clone()).collect(),
            None => vec![],
        }
    }

    pub fn basic_orbit(&self, depth: usize) -> &[u32] {
        &self.levels[depth].orbit
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let lvl = &mut self.levels[i];
        lvl.label = root_label(self.degree, lvl.base);
        lvl.orbit = vec![lvl.base];
        let mut k = 0;
        while k < lvl.orbit.len() {
            let p = lvl.orbit[k];
            for &g in &lvl.gens {
                let q = self.strong[g].apply(p);
                if lvl.label[q as usize] == NONE {
                    lvl.label[q as usize] = g as u32;
                    lvl.orbit.push(q);
                }
            }
            k += 1;
        }
    }

    /// `u_p`: the transversal element at level `i` carrying the base point to `p`.
    pub fn transversal(&self, i: usize, p: u32) -> Perm {
        let lvl = &self.levels[i];
        let mut labels = Vec::new();
        let mut q = p;
        while lvl.label[q as usize] != ROOT {
            let g = lvl.label[q as usize] as usize;
            labels.push(g);
            q = self.strong_inv[g].apply(q);
        }
        let mut u = Perm::identity(self.degree);
        for &g in labels.iter().rev() {
            u = u.mul(&self.strong[g]);
        }
        u
    }

    /// Strip `h` through levels `from..`; returns the residue and the level it stopped at.
    fn sift_from(&self, mut h: Perm, from: usize) -> (Perm, usize) {
        for i in from..self.levels.len() {
            let lvl = &self.levels[i];
            let mut p = h.apply(lvl.base);
            if lvl.label[p as usize] == NONE {
                return (h, i);
            }
            while lvl.label[p as usize] != ROOT {
                let g = lvl.label[p as usize] as usize;
                h = h.mul(&self.strong_inv[g]);
                p = self.strong_inv[g].apply(p);
            }
        }
        let n = self.levels.len();
        (h, n)
    }

    pub fn contains(&self, h: &Perm) -> bool {
        h.degree() == self.degree && self.sift_from(h.clone(), 0).0.is_identity()
    }

    /// Add a non-trivial residue that fixes base points `0..j`; returns the deepest affected level.
    fn add_residue(&mut self, h: Perm, j: usize) -> usize {
        if j == self.levels.len() {
            let b = (0..self.degree as u32).find(|&x| h.apply(x) != x).expect("identity residue");
            self.levels.push(Level { base: b, gens: vec![], orbit: vec![b], label: root_label(self.degree, b) });
        }
        let k = self.strong.len();
        self.strong_inv.push(h.inverse());
        self.strong.push(h);
        // the residue fixes base points 0..j, so it belongs to levels 0..=j
        for lvl in &mut self.levels[..=j] {
            lvl.gens.push(k);
        }
        for i in 0..=j {
            self.rebuild_orbit(i);
        }
        j
    }

    fn build(degree: usize, gens: &[Perm], prefix: &[u32]) -> StabChain {
        let mut chain = StabChain::new(degree, prefix);
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if gens.is_empty() {
            return chain.trim();
        }
        for g in &gens {
            let (r, j) = chain.sift_from(g.clone(), 0);
            if !r.is_identity() {
                chain.add_residue(r, j);
            }
        }
        // seeded random phase
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut pool: Vec<Perm> = gens.clone();
        while pool.len() < 10 {
            pool.push(gens[pool.len() % gens.len()].clone());
        }
        let mut acc = Perm::identity(degree);
        let step = |rng: &mut ChaCha8Rng, pool: &mut Vec<Perm>, acc: &mut Perm| {
            let i = rng.gen_range(0..pool.len());
            let mut j = rng.gen_range(0..pool.len() - 1);
            if j >= i {
                j += 1;
            }
            pool[i] = if rng.gen() { pool[i].mul(&pool[j]) } else { pool[i].mul(&pool[j].inverse()) };
            *acc = acc.mul(&pool[i]);
        };
        for _ in 0..40 {
            step(&mut rng, &mut pool, &mut acc);
        }
        let mut quiet = 0;
        while quiet < 30 {
            step(&mut rng, &mut pool, &mut acc);
            let (r, j) = chain.sift_from(acc.clone(), 0);
            if r.is_identity() {
                quiet += 1;
            } else {
                quiet = 0;
                chain.add_residue(r, j);
            }
        }
        chain.certify();
        chain.trim()
    }

    /// Deterministic completion: every Schreier generator must sift to the identity.
    fn certify(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lev = i - 1;
            let mut fault = None;
            'scan: for idx in 0..self.levels[lev].orbit.len() {
                let p = self.levels[lev].orbit[idx];
                let up = self.transversal(lev, p);
                for gi in 0..self.levels[lev].gens.len() {
                    let s = &self.strong[self.levels[lev].gens[gi]];
                    let (r, j) = self.sift_from(up.mul(s), lev);
                    if !r.is_identity() {
                        fault = Some((r, j));
                        break 'scan;
                    }
                }
            }
            match fault {
                Some((r, j)) => {
                    let j = self.add_residue(r, j);
                    i = j + 1;
                }
                None => i -= 1,
            }
        }
    }

    /// Drop trailing levels with trivial orbits beyond any requested prefix.
    fn trim(mut self) -> Self {
        while self.levels.last().is_some_and(|l| l.orbit.len() == 1 && l.gens.is_empty()) {
            self.levels.pop();
        }
        self
    }

    /// All group elements; only sensible for small groups.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for i in (0..self.levels.len()).rev() {
            let reps: Vec<Perm> = self.levels[i].orbit.iter().map(|&p| self.transversal(i, p)).collect();
            let mut next = Vec::with_capacity(out.len() * reps.len());
            for h in &out {
                for u in &reps {
                    next.push(h.mul(u));
                }
            }
            out = next;
        }
        out
    }
}

fn root_label(degree: usize, b: u32) -> Vec<u32> {
    let mut v = vec![NONE; degree];
    v[b as usize] = ROOT;
    v
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<StabChain>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Self {
        assert!(gens.iter().all(|g| g.degree() == degree), "generator degree mismatch");
        PermGroup { degree, gens, chain: OnceLock::new() }
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, vec![])
    }

    /// Wrap a chain computed elsewhere (for instance by a graph search).
    pub fn from_chain(gens: Vec<Perm>, chain: StabChain) -> Self {
        let g = PermGroup::new(chain.degree, gens);
        let _ = g.chain.set(chain);
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| StabChain::build(self.degree, &self.gens, &[]))
    }

    /// A fresh chain whose base starts with `prefix`.
    pub fn chain_with_base(&self, prefix: &[u32]) -> StabChain {
        let mut c = StabChain::build(self.degree, &self.gens, prefix);
        // build() trims trailing trivial levels; restore requested prefix length
        while c.levels.len() < prefix.len() {
            let b = prefix[c.levels.len()];
            c.levels.push(Level { base: b, gens: vec![], orbit: vec![b], label: root_label(self.degree, b) });
        }
        c
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn contains(&self, h: &Perm) -> bool {
        self.chain().contains(h)
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(|g| g.is_identity())
    }

    pub fn orbit(&self, p: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        seen[p as usize] = true;
        let mut out = vec![p];
        let mut k = 0;
        while k < out.len() {
            for g in &self.gens {
                let q = g.apply(out[k]);
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    out.push(q);
                }
            }
            k += 1;
        }
        out
    }

    /// Orbit partition of `points` (all points when `None`), each orbit sorted.
    pub fn orbits(&self, points: Option<&[u32]>) -> Vec<Vec<u32>> {
        let all: Vec<u32> = (0..self.degree as u32).collect();
        let pts = points.unwrap_or(&all);
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for &p in pts {
            if seen[p as usize] {
                continue;
            }
            let mut o = self.orbit(p);
            for &q in &o {
                seen[q as usize] = true;
            }
            o.sort_unstable();
            out.push(o);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    pub fn stabilizer(&self, p: u32) -> PermGroup {
        self.stabilizer_of_points(&[p])
    }

    /// Pointwise stabiliser of a sequence of points.
    pub fn stabilizer_of_points(&self, pts: &[u32]) -> PermGroup {
        let chain = self.chain_with_base(pts);
        let depth = pts.len();
        let gens = chain.level_generators(depth);
        let mut sub = StabChain { degree: self.degree, strong: vec![], strong_inv: vec![], levels: vec![] };
        let mut remap = HashMap::new();
        for lvl in &chain.levels[depth..] {
            let mut ng = Vec::new();
            for &k in &lvl.gens {
                let id = *remap.entry(k).or_insert_with(|| {
                    sub.strong.push(chain.strong[k].clone());
                    sub.strong_inv.push(chain.strong_inv[k].clone());
                    sub.strong.len() - 1
                });
                ng.push(id);
            }
            sub.levels.push(Level { base: lvl.base, gens: ng, orbit: vec![], label: vec![] });
        }
        for i in 0..sub.levels.len() {
            sub.rebuild_orbit(i);
        }
        PermGroup::from_chain(gens, sub.trim())
    }

    /// Setwise stabiliser of a small set, by orbit enumeration over all elements.
    pub fn set_stabilizer_small(&self, set: &[u32]) -> PermGroup {
        let mut key: Vec<u32> = set.to_vec();
        key.sort_unstable();
        let gens: Vec<Perm> = self
            .elements()
            .into_iter()
            .filter(|g| {
                let mut img: Vec<u32> = set.iter().map(|&x| g.apply(x)).collect();
                img.sort_unstable();
                img == key
            })
            .collect();
        PermGroup::new(self.degree, small_generating_set(self.degree, &gens))
    }

    pub fn elements(&self) -> Vec<Perm> {
        self.chain().elements()
    }

    /// Image of the group acting on a union of orbits, relabelled `0..k`.
    pub fn restrict_to(&self, pts: &[u32]) -> PermGroup {
        let mut pos = vec![u32::MAX; self.degree];
        for (i, &p) in pts.iter().enumerate() {
            pos[p as usize] = i as u32;
        }
        let gens = self
            .gens
            .iter()
            .map(|g| Perm::from_images(pts.iter().map(|&p| pos[g.apply(p) as usize]).collect()))
            .collect();
        PermGroup::new(pts.len(), gens)
    }

    /// Isomorphism type among the named stabiliser groups, for orders up to 384.
    pub fn identify_small(&self) -> Result<String, TooLarge> {
        match self.order_u64() {
            Some(n) if n <= IDENTIFY_LIMIT as u64 => {
                if self.gens.is_empty() {
                    return Ok("C1".into());
                }
                let g = crate::smallgroups::CayleyGroup::from_perms(&self.gens, IDENTIFY_LIMIT).expect("order checked");
                Ok(crate::smallgroups::identify(&g))
            }
            _ => Err(TooLarge(self.order())),
        }
    }
}

pub const IDENTIFY_LIMIT: usize = 384;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("group of order {0} is too large to identify")]
pub struct TooLarge(pub BigUint);

/// Greedy generating set for the subgroup generated by `elems`.
pub fn small_generating_set(degree: usize, elems: &[Perm]) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut chain = StabChain::build(degree, &[], &[]);
    for e in elems {
        if !chain.contains(e) {
            gens.push(e.clone());
            chain = StabChain::build(degree, &gens, &[]);
        }
    }
    gens
}

/// Closure of a set of permutations under multiplication, by breadth-first search.
pub fn enumerate_closure(degree: usize, gens: &[Perm], limit: usize) -> Option<Vec<Perm>> {
    let id = Perm::identity(degree);
    let mut seen: HashMap<Perm, ()> = HashMap::new();
    seen.insert(id.clone(), ());
    let mut out = vec![id];
    let mut q: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = q.pop_front() {
        for g in gens {
            let h = out[i].mul(g);
            if !seen.contains_key(&h) {
                if out.len() >= limit {
                    return None;
                }
                seen.insert(h.clone(), ());
                out.push(h);
                q.push_back(out.len() - 1);
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(n: usize) -> PermGroup {
        let c: Vec<u32> = (0..n as u32).collect();
        PermGroup::new(n, vec![Perm::from_cycles(n, &[&c]), Perm::from_cycles(n, &[&[0, 1]])])
    }

    fn alt(n: usize) -> PermGroup {
        let gens = (2..n as u32).map(|k| Perm::from_cycles(n, &[&[0, 1, k]])).collect();
        PermGroup::new(n, gens)
    }

    fn factorial(n: u32) -> BigUint {
        (1..=n).fold(BigUint::one(), |a, k| a * BigUint::from(k))
    }

    #[test]
    fn s3_order() {
        assert_eq!(sym(3).order(), BigUint::from(6u32));
    }

    #[test]
    fn big_symmetric_and_alternating() {
        assert_eq!(sym(12).order(), factorial(12));
        assert_eq!(alt(32).order(), factorial(32) / 2u32);
        let a = alt(10);
        assert!(a.contains(&Perm::from_cycles(10, &[&[0, 1, 2]])));
        assert!(!a.contains(&Perm::from_cycles(10, &[&[0, 1]])));
    }

    #[test]
    fn orbits_and_stabilizers() {
        let id = PermGroup::trivial(4);
        assert_eq!(id.orbits(None).len(), 4);
        let v4 = PermGroup::new(
            4,
            vec![Perm::from_cycles(4, &[&[0, 1], &[2, 3]]), Perm::from_cycles(4, &[&[0, 2], &[1, 3]])],
        );
        assert_eq!(v4.orbits(None).len(), 1);
        assert!(v4.is_transitive());
        let s5 = sym(5);
        let st = s5.stabilizer(2);
        assert_eq!(st.order(), BigUint::from(24u32));
        assert!(st.generators().iter().all(|g| g.apply(2) == 2));
        let st2 = s5.stabilizer_of_points(&[0, 1]);
        assert_eq!(st2.order(), BigUint::from(6u32));
    }

    #[test]
    fn elements_match_order() {
        let s4 = sym(4);
        let els = s4.elements();
        assert_eq!(els.len(), 24);
        let closure = enumerate_closure(4, s4.generators(), 100).unwrap();
        assert_eq!(closure.len(), 24);
    }

    fn arb_gens() -> impl Strategy<Value = Vec<Perm>> {
        let p = Just((0..7u32).collect::<Vec<_>>()).prop_shuffle().prop_map(Perm::from_images);
        prop::collection::vec(p, 1..3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn chain_order_matches_closure(gens in arb_gens()) {
            let g = PermGroup::new(7, gens.clone());
            let brute = enumerate_closure(7, &gens, 6000).unwrap();
            prop_assert_eq!(g.order(), BigUint::from(brute.len()));
            for e in brute.iter().take(50) {
                prop_assert!(g.contains(e));
            }
            let st = g.stabilizer(0);
            let o = g.orbit(0).len();
            prop_assert_eq!(st.order() * BigUint::from(o), g.order());
        }
    }
}
