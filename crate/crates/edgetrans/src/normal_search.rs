//! Normal subgroups of bounded index, found by backtracking over coset tables that
//! are forced to be regular.
//!
//! A normal subgroup of index `m` has a coset table that is the Cayley graph of the
//! quotient. Besides relator scanning, the search keeps one partial map `L_g` per
//! generator standing for left multiplication by `g`; every `L_g` must commute with
//! the table and send coset 0 to `0·g`. Such maps exist exactly when the stabiliser
//! of coset 0 is normal.
//!
//! Branching always fills the first undefined entry in row-major order and a new
//! coset takes the next free number, so every table is produced already in standard
//! form and each subgroup is met exactly once.

use crate::coset_enum::{CosetTable, UNDEF};
use crate::fpcore::Presentation;
use crate::permgroup::PermGroup;
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    pub max_index: usize,
    /// Maximum number of branch attempts before giving up.
    pub node_budget: Option<u64>,
    /// Worker count; 0 uses the global rayon pool.
    pub jobs: usize,
    pub seed: Option<SeedTable>,
}

impl SearchConfig {
    pub fn new(max_index: usize) -> Self {
        SearchConfig { max_index, ..Default::default() }
    }
}

/// Entries fixed before the search starts; row `i` column `c` as in [`CosetTable`],
/// [`UNDEF`] where free. Only subgroups whose tables extend the seed are returned.
#[derive(Clone, Debug)]
pub struct SeedTable {
    pub rows: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct NormalSubgroupRecord {
    pub index: usize,
    /// Standardised coset table of the subgroup.
    pub table: CosetTable,
    /// Regular permutation image of the group on the cosets.
    pub quotient: PermGroup,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Sorted by index, then by table.
    pub records: Vec<NormalSubgroupRecord>,
    /// Every normal subgroup of index at most this value is in `records`.
    pub swept_to: usize,
    pub nodes: u64,
}

impl SearchOutcome {
    pub fn complete(&self, max_index: usize) -> bool {
        self.swept_to >= max_index
    }
}

#[derive(thiserror::Error, Debug, Clone)]
pub enum SearchError {
    #[error("index bound must be at least 1")]
    ZeroIndex,
    #[error("seed table has the wrong shape or is inconsistent")]
    BadSeed,
    #[error("search budget exhausted; complete up to index {swept_to}")]
    BudgetExceeded { swept_to: usize, partial: Vec<NormalSubgroupRecord> },
}

/// All normal subgroups of index at most `max_index`.
pub fn normal_subgroups(p: &Presentation, max_index: usize) -> Result<Vec<NormalSubgroupRecord>, SearchError> {
    let out = search(p, &SearchConfig::new(max_index))?;
    if out.complete(max_index) {
        Ok(out.records)
    } else {
        Err(SearchError::BudgetExceeded { swept_to: out.swept_to, partial: out.records })
    }
}

/// Like [`normal_subgroups`] but returns partial results when the budget runs out.
///
/// With a node budget the bound is raised by doubling, so an interrupted search
/// still certifies the last bound it finished.
pub fn search(p: &Presentation, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    if cfg.max_index == 0 {
        return Err(SearchError::ZeroIndex);
    }
    let Some(budget) = cfg.node_budget else {
        let (tables, done, nodes) = run_capped(p, cfg, cfg.max_index, u64::MAX)?;
        return Ok(finish(tables, if done { cfg.max_index } else { 0 }, nodes));
    };
    let floor = cfg.seed.as_ref().map_or(1, |s| s.rows.len());
    let mut cap = floor.max(16).min(cfg.max_index);
    let mut swept = 0;
    let mut spent = 0u64;
    let mut best = Vec::new();
    loop {
        let (tables, done, nodes) = run_capped(p, cfg, cap, budget - spent)?;
        spent += nodes;
        if done {
            swept = cap;
            best = tables;
        } else {
            best.extend(tables);
        }
        if !done || cap == cfg.max_index || spent >= budget {
            break;
        }
        cap = (2 * cap).min(cfg.max_index);
    }
    Ok(finish(best, swept, spent))
}

fn finish(mut tables: Vec<CosetTable>, swept_to: usize, nodes: u64) -> SearchOutcome {
    tables.sort_unstable_by(|a, b| (a.len(), a.raw()).cmp(&(b.len(), b.raw())));
    tables.dedup();
    let records = tables
        .into_iter()
        .map(|t| {
            let quotient = t.core_quotient().expect("complete table");
            NormalSubgroupRecord { index: t.len(), table: t, quotient }
        })
        .collect();
    SearchOutcome { records, swept_to, nodes }
}

/// One exhaustive pass with coset bound `cap`; reports whether it finished.
fn run_capped(
    p: &Presentation,
    cfg: &SearchConfig,
    cap: usize,
    budget: u64,
) -> Result<(Vec<CosetTable>, bool, u64), SearchError> {
    let shape = Shape::new(p, cap);
    let mut root = State::new(&shape);
    let ok = match &cfg.seed {
        Some(seed) => root.apply_seed(&shape, seed)?,
        None => root.propagate(&shape),
    };
    if !ok {
        return Ok((vec![], true, 0));
    }
    let shared = Shared {
        nodes: AtomicU64::new(0),
        budget,
        stop: AtomicBool::new(false),
        found: Mutex::new(Vec::new()),
    };
    let jobs = if cfg.jobs == 0 { rayon::current_num_threads() } else { cfg.jobs };
    if jobs <= 1 {
        root.dfs(&shape, &shared, &[]);
    } else {
        let tasks = split(&shape, &root, &shared, 8 * jobs);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
        pool.install(|| {
            tasks.par_iter().for_each(|prefix| {
                let mut st = root.clone();
                st.dfs(&shape, &shared, prefix);
            })
        });
    }
    let tables = std::mem::take(&mut *shared.found.lock().unwrap());
    let done = !shared.stop.load(Ordering::Relaxed);
    Ok((tables, done, shared.nodes.load(Ordering::Relaxed)))
}

struct Shared {
    nodes: AtomicU64,
    budget: u64,
    stop: AtomicBool,
    found: Mutex<Vec<CosetTable>>,
}

struct Shape {
    ngens: usize,
    ncols: usize,
    cap: usize,
    /// Cyclic rotations of every relator and its inverse, grouped by first column.
    rots: Vec<Vec<Vec<u16>>>,
    relators: Vec<Vec<u16>>,
}

impl Shape {
    fn new(p: &Presentation, cap: usize) -> Self {
        let ngens = p.ngens();
        let ncols = 2 * ngens;
        let mut rots: Vec<Vec<Vec<u16>>> = vec![Vec::new(); ncols];
        let mut relators = Vec::new();
        for r in &p.relators {
            let r = crate::fpcore::reduce(r);
            if r.is_empty() {
                continue;
            }
            let cols: Vec<u16> = r.letters().iter().map(|l| l.column() as u16).collect();
            relators.push(cols.clone());
            let inv: Vec<u16> = cols.iter().rev().map(|&c| c ^ 1).collect();
            for w in [cols, inv] {
                for k in 0..w.len() {
                    let rot: Vec<u16> = w[k..].iter().chain(&w[..k]).copied().collect();
                    let first = rot[0] as usize;
                    if !rots[first].contains(&rot) {
                        rots[first].push(rot);
                    }
                }
            }
        }
        Shape { ngens, ncols, cap, rots, relators }
    }
}

#[derive(Clone, Copy)]
enum Event {
    T(u32, u16),
    L(u16, u32),
}

#[derive(Clone, Copy)]
enum Undo {
    T(u32),
    L(u32),
}

#[derive(Clone)]
struct State {
    n: usize,
    table: Vec<u32>,
    lmap: Vec<u32>,
    linv: Vec<u32>,
    trail: Vec<Undo>,
    queue: Vec<Event>,
}

struct Frame {
    pos: usize,
    next: u32,
    mark: usize,
    n: usize,
}

impl State {
    fn new(s: &Shape) -> Self {
        State {
            n: 1,
            table: vec![UNDEF; s.cap * s.ncols],
            lmap: vec![UNDEF; s.ngens * s.cap],
            linv: vec![UNDEF; s.ngens * s.cap],
            trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn apply_seed(&mut self, s: &Shape, seed: &SeedTable) -> Result<bool, SearchError> {
        let n = seed.rows.len();
        if n == 0 || n > s.cap || seed.rows.iter().any(|r| r.len() != s.ncols) {
            return Err(SearchError::BadSeed);
        }
        self.n = n;
        for (i, row) in seed.rows.iter().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                if e == UNDEF {
                    continue;
                }
                if e as usize >= n {
                    return Err(SearchError::BadSeed);
                }
                if !self.set_t(s, i as u32, c as u16, e) {
                    return Ok(false);
                }
            }
        }
        Ok(self.propagate(s))
    }

    #[inline]
    fn t(&self, s: &Shape, row: u32, col: u16) -> u32 {
        self.table[row as usize * s.ncols + col as usize]
    }

    fn set_t(&mut self, s: &Shape, a: u32, c: u16, b: u32) -> bool {
        let p1 = a as usize * s.ncols + c as usize;
        if self.table[p1] != UNDEF {
            return self.table[p1] == b;
        }
        let p2 = b as usize * s.ncols + (c ^ 1) as usize;
        if self.table[p2] != UNDEF {
            return false;
        }
        self.table[p1] = b;
        self.trail.push(Undo::T(p1 as u32));
        self.queue.push(Event::T(a, c));
        if p2 != p1 {
            self.table[p2] = a;
            self.trail.push(Undo::T(p2 as u32));
            self.queue.push(Event::T(b, c ^ 1));
        }
        true
    }

    fn set_l(&mut self, s: &Shape, g: u16, i: u32, x: u32) -> bool {
        let idx = g as usize * s.cap + i as usize;
        if self.lmap[idx] != UNDEF {
            return self.lmap[idx] == x;
        }
        let inv = g as usize * s.cap + x as usize;
        if self.linv[inv] != UNDEF {
            return false;
        }
        self.lmap[idx] = x;
        self.linv[inv] = i;
        self.trail.push(Undo::L(idx as u32));
        self.queue.push(Event::L(g, i));
        true
    }

    fn undo(&mut self, s: &Shape, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::T(p) => self.table[p as usize] = UNDEF,
                Undo::L(idx) => {
                    let g = idx as usize / s.cap;
                    let x = self.lmap[idx as usize];
                    self.linv[g * s.cap + x as usize] = UNDEF;
                    self.lmap[idx as usize] = UNDEF;
                }
            }
        }
    }

    /// `T[a][c] = b` and `L_g(a) = la` together force `L_g(b) = T[la][c]`.
    #[inline]
    fn pair(&mut self, s: &Shape, g: u16, la: u32, c: u16, b: u32) -> bool {
        let lb = self.lmap[g as usize * s.cap + b as usize];
        let t = self.t(s, la, c);
        if lb != UNDEF {
            if t != UNDEF {
                t == lb
            } else {
                self.set_t(s, la, c, lb)
            }
        } else if t != UNDEF {
            self.set_l(s, g, b, t)
        } else {
            true
        }
    }

    fn scan(&mut self, s: &Shape, a: u32, w: &[u16]) -> bool {
        let len = w.len();
        let mut f = a;
        let mut i = 0;
        while i < len {
            let e = self.t(s, f, w[i]);
            if e == UNDEF {
                break;
            }
            f = e;
            i += 1;
        }
        if i == len {
            return f == a;
        }
        let mut b = a;
        let mut j = len;
        while j > i {
            let e = self.t(s, b, w[j - 1] ^ 1);
            if e == UNDEF {
                break;
            }
            b = e;
            j -= 1;
        }
        if j == i {
            return f == b;
        }
        if j == i + 1 {
            return self.set_t(s, f, w[i], b);
        }
        true
    }

    fn propagate(&mut self, s: &Shape) -> bool {
        let mut k = 0;
        while k < self.queue.len() {
            let ev = self.queue[k];
            k += 1;
            let ok = match ev {
                Event::T(a, c) => self.on_t(s, a, c),
                Event::L(g, i) => self.on_l(s, g, i),
            };
            if !ok {
                self.queue.clear();
                return false;
            }
        }
        self.queue.clear();
        true
    }

    fn on_t(&mut self, s: &Shape, a: u32, c: u16) -> bool {
        let b = self.t(s, a, c);
        for w in &s.rots[c as usize] {
            if !self.scan(s, a, w) {
                return false;
            }
        }
        if a == 0 {
            let g = c / 2;
            let ok = if c.is_multiple_of(2) { self.set_l(s, g, 0, b) } else { self.set_l(s, g, b, 0) };
            if !ok {
                return false;
            }
        }
        for g in 0..s.ngens as u16 {
            let la = self.lmap[g as usize * s.cap + a as usize];
            if la != UNDEF && !self.pair(s, g, la, c, b) {
                return false;
            }
            // `a` may itself be an image `L_g(a')`
            let pre = self.linv[g as usize * s.cap + a as usize];
            if pre != UNDEF {
                let b2 = self.t(s, pre, c);
                if b2 != UNDEF && !self.pair(s, g, a, c, b2) {
                    return false;
                }
            }
        }
        true
    }

    fn on_l(&mut self, s: &Shape, g: u16, a: u32) -> bool {
        let la = self.lmap[g as usize * s.cap + a as usize];
        for c in 0..s.ncols as u16 {
            let b = self.t(s, a, c);
            if b != UNDEF && !self.pair(s, g, la, c, b) {
                return false;
            }
        }
        true
    }

    fn first_undef(&self, s: &Shape, from: usize) -> Option<usize> {
        (from..self.n * s.ncols).find(|&p| self.table[p] == UNDEF)
    }

    /// Try option `v` at `pos`: an existing coset, or `n` for a new one.
    fn try_option(&mut self, s: &Shape, pos: usize, v: u32) -> bool {
        let (row, col) = ((pos / s.ncols) as u32, (pos % s.ncols) as u16);
        if v as usize == self.n {
            self.n += 1;
        }
        self.set_t(s, row, col, v) && self.propagate(s)
    }

    fn option_valid(&self, s: &Shape, pos: usize, v: u32, n: usize) -> bool {
        let col = (pos % s.ncols) as u16;
        if (v as usize) < n {
            self.t(s, v, col ^ 1) == UNDEF
        } else {
            v as usize == n && n < s.cap
        }
    }

    fn snapshot(&self, s: &Shape) -> Option<CosetTable> {
        let rows: Vec<Vec<u32>> =
            (0..self.n).map(|i| self.table[i * s.ncols..(i + 1) * s.ncols].to_vec()).collect();
        // defensive check of relators and regularity on the finished table
        for i in 0..self.n as u32 {
            for w in &s.relators {
                let mut r = i;
                for &c in w {
                    r = rows[r as usize][c as usize];
                }
                if r != i {
                    return None;
                }
            }
            for g in 0..s.ngens {
                if self.lmap[g * s.cap + i as usize] == UNDEF {
                    return None;
                }
            }
        }
        Some(CosetTable::from_rows(s.ngens, rows, vec![]).standardize())
    }

    /// Depth-first search below the state reached by replaying `prefix`.
    fn dfs(&mut self, s: &Shape, sh: &Shared, prefix: &[u32]) {
        let mut pos = 0;
        for &v in prefix {
            pos = self.first_undef(s, pos).expect("prefix replays");
            let ok = self.try_option(s, pos, v);
            debug_assert!(ok);
        }
        if sh.stop.load(Ordering::Relaxed) {
            return;
        }
        let mut stack: Vec<Frame> = Vec::new();
        match self.first_undef(s, pos) {
            None => {
                if prefix.is_empty() {
                    self.record(s, sh);
                }
                return;
            }
            Some(p) => stack.push(Frame { pos: p, next: 0, mark: self.trail.len(), n: self.n }),
        }
        let mut local_nodes = 0u64;
        while let Some(fr) = stack.last_mut() {
            self.undo(s, fr.mark);
            self.n = fr.n;
            let mut v = fr.next;
            while (v as usize) <= fr.n && !self.option_valid(s, fr.pos, v, fr.n) {
                v += 1;
            }
            if v as usize > fr.n {
                stack.pop();
                continue;
            }
            fr.next = v + 1;
            let pos = fr.pos;
            local_nodes += 1;
            if local_nodes == 1024 {
                let total = sh.nodes.fetch_add(local_nodes, Ordering::Relaxed) + local_nodes;
                local_nodes = 0;
                if total >= sh.budget || sh.stop.load(Ordering::Relaxed) {
                    sh.stop.store(true, Ordering::Relaxed);
                    let top = stack.last().unwrap();
                    self.undo(s, top.mark);
                    return;
                }
            }
            if !self.try_option(s, pos, v) {
                continue;
            }
            match self.first_undef(s, pos) {
                None => self.record(s, sh),
                Some(p) => stack.push(Frame { pos: p, next: 0, mark: self.trail.len(), n: self.n }),
            }
        }
        sh.nodes.fetch_add(local_nodes, Ordering::Relaxed);
    }

    fn record(&self, s: &Shape, sh: &Shared) {
        if let Some(t) = self.snapshot(s) {
            sh.found.lock().unwrap().push(t);
        }
    }
}

/// Breadth-first expansion of the top of the tree into at least `want` subtrees.
fn split(s: &Shape, root: &State, sh: &Shared, want: usize) -> Vec<Vec<u32>> {
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    let mut root_done = false;
    for _depth in 0..6 {
        if frontier.len() >= want {
            break;
        }
        let mut next = Vec::new();
        for prefix in &frontier {
            let mut st = root.clone();
            let mut pos = 0;
            for &v in prefix {
                pos = st.first_undef(s, pos).unwrap();
                st.try_option(s, pos, v);
            }
            let pos = match st.first_undef(s, pos) {
                None => {
                    if !prefix.is_empty() || !root_done {
                        st.record(s, sh);
                        root_done |= prefix.is_empty();
                    }
                    continue;
                }
                Some(p) => p,
            };
            let n = st.n;
            let mark = st.trail.len();
            for v in 0..=n as u32 {
                if !st.option_valid(s, pos, v, n) {
                    continue;
                }
                if st.try_option(s, pos, v) {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
                st.undo(s, mark);
                st.n = n;
            }
        }
        frontier = next;
    }
    // prefixes that are already complete tables were recorded during expansion
    frontier
        .into_iter()
        .filter(|p| {
            let mut st = root.clone();
            let mut pos = 0;
            for &v in p {
                pos = st.first_undef(s, pos).unwrap();
                st.try_option(s, pos, v);
            }
            if st.first_undef(s, pos).is_none() {
                st.record(s, sh);
                false
            } else {
                true
            }
        })
        .collect()
}
