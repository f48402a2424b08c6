//! Permutations on `0..n` acting on the right: `p^(a*b) = (p^a)^b`.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Panics if `images` is not a bijection of `0..len`.
    pub fn from_images(images: Vec<u32>) -> Self {
        Self::try_from_images(images).expect("not a permutation")
    }

    pub fn try_from_images(images: Vec<u32>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    /// Build from disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Self {
        let mut v: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for k in 0..c.len() {
                v[c[k] as usize] = c[(k + 1) % c.len()];
            }
        }
        Perm::from_images(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, p: u32) -> u32 {
        self.0[p as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j as usize] = i as u32;
        }
        Perm(v)
    }

    pub fn pow(&self, mut e: i64) -> Perm {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        e = e.abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `self⁻¹ · other · self`, i.e. `other` conjugated by `self`.
    pub fn conj(&self, other: &Perm) -> Perm {
        self.inverse().mul(other).mul(self)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut l: u64 = 1;
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                p = self.0[p] as usize;
                len += 1;
            }
            l = lcm(l, len);
        }
        l
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            let mut c = Vec::new();
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                c.push(p as u32);
                p = self.0[p] as usize;
            }
            out.push(c);
        }
        out
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &j)| *i as u32 == j).count()
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for c in cs {
            let s: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", s.join(","))?;
        }
        Ok(())
    }
}
