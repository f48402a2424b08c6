//! Todd–Coxeter coset enumeration (HLT with lookahead) and coset actions.

use crate::fpcore::{Presentation, Word};
use crate::perm::Perm;
use crate::permgroup::PermGroup;

pub const UNDEF: u32 = u32::MAX;

/// Budget used when nothing is known about the index.
pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

/// `200 ×` the expected index, or [`DEFAULT_MAX_COSETS`].
pub fn default_budget(expected_index: Option<usize>) -> usize {
    match expected_index {
        Some(k) => (200 * k).max(64),
        None => DEFAULT_MAX_COSETS,
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("coset budget of {budget} exhausted ({live} live cosets)")]
    BudgetExhausted { budget: usize, live: usize },
    #[error("coset table is incomplete")]
    Incomplete,
    #[error("budget must be at least 1")]
    ZeroBudget,
}

/// A coset table: row `i`, column `2g` (resp. `2g+1`) gives `i·g` (resp. `i·g⁻¹`).
/// Rows are 0-based; row 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetTable {
    ngens: usize,
    rows: usize,
    data: Vec<u32>,
    origin: Vec<Word>,
}

impl CosetTable {
    pub fn from_rows(ngens: usize, rows: Vec<Vec<u32>>, origin: Vec<Word>) -> Self {
        let n = rows.len();
        let data = rows.into_iter().flatten().collect::<Vec<_>>();
        assert_eq!(data.len(), n * 2 * ngens);
        CosetTable { ngens, rows: n, data, origin }
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn origin(&self) -> &[Word] {
        &self.origin
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.data[row * 2 * self.ngens + col]
    }

    pub fn raw(&self) -> &[u32] {
        &self.data
    }

    pub fn is_complete(&self) -> bool {
        self.data.iter().all(|&e| e != UNDEF)
    }

    /// Image of `row` under a word, if every step is defined.
    pub fn trace(&self, row: usize, w: &Word) -> Option<usize> {
        let mut r = row;
        for l in w.letters() {
            let e = self.get(r, l.column());
            if e == UNDEF {
                return None;
            }
            r = e as usize;
        }
        Some(r)
    }

    /// One permutation per generator, for the right-multiplication action.
    pub fn permutation_image(&self) -> Result<Vec<Perm>, EnumError> {
        if !self.is_complete() {
            return Err(EnumError::Incomplete);
        }
        Ok((0..self.ngens)
            .map(|g| Perm::from_images((0..self.rows).map(|r| self.get(r, 2 * g)).collect()))
            .collect())
    }

    /// `G/core(H)` acting on the cosets of `H`.
    pub fn core_quotient(&self) -> Result<PermGroup, EnumError> {
        Ok(PermGroup::new(self.rows, self.permutation_image()?))
    }

    /// Renumber rows in breadth-first order from row 0 with the fixed column order.
    pub fn standardize(&self) -> CosetTable {
        self.renumber_from(0)
    }

    /// Breadth-first renumbering that starts at `start` instead of row 0.
    pub fn renumber_from(&self, start: usize) -> CosetTable {
        let cols = 2 * self.ngens;
        let mut new_of = vec![UNDEF; self.rows];
        let mut order = Vec::with_capacity(self.rows);
        new_of[start] = 0;
        order.push(start);
        let mut k = 0;
        while k < order.len() {
            let r = order[k];
            for c in 0..cols {
                let e = self.get(r, c);
                if e != UNDEF && new_of[e as usize] == UNDEF {
                    new_of[e as usize] = order.len() as u32;
                    order.push(e as usize);
                }
            }
            k += 1;
        }
        let mut data = Vec::with_capacity(order.len() * cols);
        for &r in &order {
            for c in 0..cols {
                let e = self.get(r, c);
                data.push(if e == UNDEF { UNDEF } else { new_of[e as usize] });
            }
        }
        CosetTable { ngens: self.ngens, rows: order.len(), data, origin: self.origin.clone() }
    }

    /// Checks the defining properties of a complete table.
    pub fn validate(&self, p: &Presentation) -> bool {
        if !self.is_complete() {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..2 * self.ngens {
                if self.get(self.get(r, c) as usize, c ^ 1) as usize != r {
                    return false;
                }
            }
            if p.relators.iter().any(|w| self.trace(r, w) != Some(r)) {
                return false;
            }
        }
        self.origin.iter().all(|w| self.trace(0, w) == Some(0))
    }
}

/// Enumerate the cosets of `⟨subgens⟩` in the group presented by `p`.
///
/// `max_cosets` bounds the number of live cosets at any time.
pub fn enumerate(p: &Presentation, subgens: &[Word], max_cosets: usize) -> Result<CosetTable, EnumError> {
    if max_cosets == 0 {
        return Err(EnumError::ZeroBudget);
    }
    let cols_of = |w: &Word| -> Vec<usize> { w.letters().iter().map(|l| l.column()).collect() };
    let mut e = Enumerator::new(p.ngens());
    e.rels = p.relators.iter().filter(|r| !r.is_empty()).map(cols_of).collect();
    e.subgens = subgens.iter().filter(|w| !w.is_empty()).map(cols_of).collect();
    // definitions made while processing one coset never exceed this
    let slack = e.rels.iter().map(|r| r.len()).sum::<usize>()
        + e.subgens.iter().map(|r| r.len()).sum::<usize>()
        + e.cols;
    let over = |e: &Enumerator| e.n + slack > max_cosets.max(slack + 1);
    for k in 0..e.subgens.len() {
        let w = e.subgens[k].clone();
        let r0 = e.rep(0);
        e.scan_and_fill(r0, &w);
    }
    let mut c = 0;
    while c < e.n {
        if over(&e) {
            c = e.lookahead(c);
            if over(&e) {
                return Err(EnumError::BudgetExhausted { budget: max_cosets, live: e.live_count() });
            }
            if c >= e.n {
                break;
            }
        }
        if e.live(c) {
            for ri in 0..e.rels.len() {
                let r = e.rels[ri].clone();
                e.scan_and_fill(c, &r);
                if !e.live(c) {
                    break;
                }
            }
            if e.live(c) {
                for x in 0..e.cols {
                    if e.entry(c, x) == UNDEF {
                        e.define(c, x);
                    }
                }
            }
        }
        c += 1;
    }
    e.compact(0);
    if e.n > max_cosets {
        return Err(EnumError::BudgetExhausted { budget: max_cosets, live: e.n });
    }
    let t = CosetTable { ngens: p.ngens(), rows: e.n, data: e.table, origin: subgens.to_vec() };
    Ok(t.standardize())
}

struct Enumerator {
    cols: usize,
    n: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    rels: Vec<Vec<usize>>,
    subgens: Vec<Vec<usize>>,
}

impl Enumerator {
    fn new(ngens: usize) -> Self {
        let cols = 2 * ngens;
        Enumerator { cols, n: 1, table: vec![UNDEF; cols], parent: vec![0], rels: vec![], subgens: vec![] }
    }

    #[inline]
    fn entry(&self, c: usize, x: usize) -> u32 {
        self.table[c * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: usize, x: usize, v: u32) {
        self.table[c * self.cols + x] = v;
    }

    fn live(&self, c: usize) -> bool {
        self.parent[c] as usize == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] as usize != r {
            r = self.parent[r] as usize;
        }
        let mut k = c;
        while self.parent[k] as usize != r {
            let nx = self.parent[k] as usize;
            self.parent[k] = r as u32;
            k = nx;
        }
        r
    }

    fn live_count(&self) -> usize {
        (0..self.n).filter(|&c| self.live(c)).count()
    }

    fn define(&mut self, c: usize, x: usize) -> usize {
        let d = self.n;
        self.n += 1;
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.parent.push(d as u32);
        self.set(c, x, d as u32);
        self.set(d, x ^ 1, c as u32);
        d
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) {
        let n = w.len();
        let mut f = c;
        let mut i = 0usize;
        let mut b = c;
        let mut j = n;
        loop {
            while i < j && self.entry(f, w[i]) != UNDEF {
                f = self.entry(f, w[i]) as usize;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j > i && self.entry(b, w[j - 1] ^ 1) != UNDEF {
                b = self.entry(b, w[j - 1] ^ 1) as usize;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return;
            }
            if j == i + 1 {
                self.set(f, w[i], b as u32);
                self.set(b, w[i] ^ 1, f as u32);
                return;
            }
            self.define(f, w[i]);
        }
    }

    /// Deduction-only scan; never defines new cosets.
    fn scan(&mut self, c: usize, w: &[usize]) {
        if w.is_empty() {
            return;
        }
        let mut f = c;
        let mut i = 0usize;
        let n = w.len();
        while i < n && self.entry(f, w[i]) != UNDEF {
            f = self.entry(f, w[i]) as usize;
            i += 1;
        }
        if i == n {
            if f != c {
                self.coincidence(f, c);
            }
            return;
        }
        let mut b = c;
        let mut j = n;
        while j > i && self.entry(b, w[j - 1] ^ 1) != UNDEF {
            b = self.entry(b, w[j - 1] ^ 1) as usize;
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            self.set(f, w[i], b as u32);
            self.set(b, w[i] ^ 1, f as u32);
        }
    }

    /// Deduction-only pass over every live coset, then compaction.
    /// Returns the new position of the cursor `c`.
    fn lookahead(&mut self, c: usize) -> usize {
        for k in 0..self.subgens.len() {
            let w = self.subgens[k].clone();
            let r0 = self.rep(0);
            self.scan(r0, &w);
        }
        for d in 0..self.n {
            if self.live(d) {
                for ri in 0..self.rels.len() {
                    let w = self.rels[ri].clone();
                    self.scan(d, &w);
                    if !self.live(d) {
                        break;
                    }
                }
            }
        }
        self.compact(c)
    }

    fn merge(&mut self, k: usize, l: usize, q: &mut Vec<usize>) {
        let k1 = self.rep(k);
        let l1 = self.rep(l);
        if k1 == l1 {
            return;
        }
        let (m, n) = if k1 < l1 { (k1, l1) } else { (l1, k1) };
        self.parent[n] = m as u32;
        q.push(n);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut q = Vec::new();
        self.merge(a, b, &mut q);
        let mut i = 0;
        while i < q.len() {
            let g = q[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.entry(g, x);
                if d == UNDEF {
                    continue;
                }
                let d = d as usize;
                self.set(g, x, UNDEF);
                if self.entry(d, x ^ 1) as usize == g {
                    self.set(d, x ^ 1, UNDEF);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                if self.entry(mu, x) != UNDEF {
                    let t = self.entry(mu, x) as usize;
                    self.merge(nu, t, &mut q);
                } else if self.entry(nu, x ^ 1) != UNDEF {
                    let t = self.entry(nu, x ^ 1) as usize;
                    self.merge(mu, t, &mut q);
                } else {
                    self.set(mu, x, nu as u32);
                    self.set(nu, x ^ 1, mu as u32);
                }
            }
        }
    }

    /// Drop dead rows, keeping live rows in their current order. Returns the
    /// new index of the first live row at or after `c`.
    fn compact(&mut self, c: usize) -> usize {
        let mut map = vec![UNDEF; self.n];
        let mut k = 0u32;
        let mut cursor = None;
        for d in 0..self.n {
            if self.live(d) {
                if d >= c && cursor.is_none() {
                    cursor = Some(k as usize);
                }
                map[d] = k;
                k += 1;
            }
        }
        let mut data = Vec::with_capacity(k as usize * self.cols);
        for d in 0..self.n {
            if map[d] == UNDEF {
                continue;
            }
            for x in 0..self.cols {
                let e = self.entry(d, x);
                data.push(if e == UNDEF { UNDEF } else { map[e as usize] });
            }
        }
        self.table = data;
        self.n = k as usize;
        self.parent = (0..k).collect();
        cursor.unwrap_or(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(gens: &[&str], rels: &[&str]) -> Presentation {
        let mut p = Presentation::new(gens).unwrap();
        for r in rels {
            p.add_relator(r).unwrap();
        }
        p
    }

    #[test]
    fn s3_over_c2() {
        let p = pres(&["c", "x"], &["c^2", "x^3", "(cx)^2"]);
        let t = enumerate(&p, &[p.parse_word("c").unwrap()], 1000).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.validate(&p));
        let im = t.permutation_image().unwrap();
        assert_eq!(im[1].order(), 3);
        let all = enumerate(&p, &[p.parse_word("c").unwrap(), p.parse_word("x").unwrap()], 10).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all.permutation_image().unwrap().iter().all(|g| g.is_identity()));
        assert!(all.core_quotient().unwrap().is_trivial());
    }

    #[test]
    fn a4_regular() {
        let p = pres(&["c", "d", "y"], &["c^2", "d^2", "[c,d]", "y^3", "(cy)^3", "dy^-1cy"]);
        let t = enumerate(&p, &[], 1000).unwrap();
        assert_eq!(t.len(), 12);
        assert!(t.validate(&p));
    }

    #[test]
    fn tight_budget_still_finishes_or_reports() {
        let p = pres(&["a", "b"], &["a^8", "b^7", "(ab)^2", "(a^-1b)^3"]);
        let t = enumerate(&p, &[p.parse_word("a^2").unwrap(), p.parse_word("a^-1b").unwrap()], 2000).unwrap();
        assert_eq!(t.len(), 448);
        assert!(t.validate(&p));
        let e = enumerate(&p, &[p.parse_word("a^2").unwrap(), p.parse_word("a^-1b").unwrap()], 200);
        assert!(matches!(e, Err(EnumError::BudgetExhausted { .. })));
    }

    #[test]
    fn deterministic() {
        let p = pres(&["x", "y"], &["x^2", "y^3", "(xy)^7", "[x,y]^4"]);
        let a = enumerate(&p, &[], 20000).unwrap();
        let b = enumerate(&p, &[], 20000).unwrap();
        assert_eq!(a.len(), 168);
        assert_eq!(a, b);
        assert_eq!(a.core_quotient().unwrap().order_u64(), Some(168));
    }

    #[test]
    fn infinite_group_exhausts_budget() {
        let p = pres(&["x", "y"], &["x^3", "y^3"]);
        assert!(matches!(enumerate(&p, &[], 500), Err(EnumError::BudgetExhausted { .. })));
        assert_eq!(enumerate(&p, &[], 0), Err(EnumError::ZeroBudget));
    }
}
