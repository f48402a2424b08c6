//! The amalgam classes, the inclusion ledger, normal forms in `A ∗_C B`, and
//! the inclusion verifier.

use crate::coset_enum::{default_budget, enumerate, CosetTable, EnumError, UNDEF};
use crate::normal_search::SeedTable;
use crate::fpcore::{substitute_all, FpError, Letter, Presentation, Word};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

const AMALGAMS: &str = include_str!("../data/amalgams.txt");
const INCLUSIONS: &str = include_str!("../data/inclusions.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    ArcTransitive,
    Semisymmetric,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::ArcTransitive => "arc-transitive",
            Kind::Semisymmetric => "semisymmetric",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalS {
    Pair(u32, u32),
    Single(u32),
}

impl fmt::Display for LocalS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalS::Pair(a, b) => write!(f, "({},{})", a, b),
            LocalS::Single(s) => write!(f, "{}", s),
        }
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("catalog data line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error(transparent)]
    Word(#[from] FpError),
    #[error("stabiliser {label} of {class} has order {got}, expected {want}")]
    StabOrder { class: String, label: String, got: usize, want: usize },
    #[error(transparent)]
    Enum(#[from] EnumError),
}

/// One amalgam class with its presentation and stabiliser data.
#[derive(Debug)]
pub struct AmalgamSpec {
    pub id: String,
    pub kind: Kind,
    pub presentation: Presentation,
    /// Generator indices of A, B, C.
    pub a_gens: Vec<usize>,
    pub b_gens: Vec<usize>,
    pub c_gens: Vec<usize>,
    pub stab: (usize, usize, usize),
    pub local_s: LocalS,
    /// Isomorphism types of A, B, C as listed in the data (`None` when unnamed).
    pub iso: [Option<String>; 3],
    pub variants: Vec<Word>,
    groups: OnceLock<Result<Factors, CatalogError>>,
}

impl AmalgamSpec {
    /// Edge-stabiliser order: |C| for semisymmetric, |B| for arc-transitive.
    pub fn edge_stab_order(&self) -> usize {
        match self.kind {
            Kind::Semisymmetric => self.stab.2,
            Kind::ArcTransitive => self.stab.1,
        }
    }

    /// Generators of the edge stabiliser.
    pub fn edge_stab_gens(&self) -> &[usize] {
        match self.kind {
            Kind::Semisymmetric => &self.c_gens,
            Kind::ArcTransitive => &self.b_gens,
        }
    }

    pub fn subgroup_words(&self, label: char) -> Vec<Word> {
        let g = match label {
            'A' => &self.a_gens,
            'B' => &self.b_gens,
            _ => &self.c_gens,
        };
        g.iter().map(|&i| Word::gen(i)).collect()
    }

    /// The finite groups A and B materialised from their own relators.
    pub fn factors(&self) -> Result<&Factors, CatalogError> {
        self.groups.get_or_init(|| Factors::build(self)).as_ref().map_err(|e| e.clone())
    }

    pub fn display_name(&self) -> &str {
        &self.id
    }

    /// Partial regular table holding A and B amalgamated over C: rows `0..|A|` are A,
    /// the elements of B outside C follow. Quotients extending it keep A and B faithful.
    pub fn faithful_seed(&self) -> Result<SeedTable, CatalogError> {
        let f = self.factors()?;
        let ncols = 2 * self.presentation.ngens();
        let mut b_to_row = vec![u32::MAX; f.b.order];
        for (i, &cb) in f.c_in_b.iter().enumerate() {
            b_to_row[cb as usize] = f.c_in_a[i];
        }
        let mut next = f.a.order as u32;
        for r in b_to_row.iter_mut().filter(|r| **r == u32::MAX) {
            *r = next;
            next += 1;
        }
        let mut rows = vec![vec![UNDEF; ncols]; next as usize];
        for e in 0..f.a.order {
            for (k, &g) in f.a.gens.iter().enumerate() {
                rows[e][2 * g] = f.a.table.get(e, 2 * k);
                rows[e][2 * g + 1] = f.a.table.get(e, 2 * k + 1);
            }
        }
        for e in 0..f.b.order {
            let r = b_to_row[e] as usize;
            for (k, &g) in f.b.gens.iter().enumerate() {
                rows[r][2 * g] = b_to_row[f.b.table.get(e, 2 * k) as usize];
                rows[r][2 * g + 1] = b_to_row[f.b.table.get(e, 2 * k + 1) as usize];
            }
        }
        Ok(SeedTable { rows })
    }
}

/// A finite group given by its regular multiplication table; element 0 is the identity
/// and elements are numbered in shortlex order of their minimal words.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    /// Amalgam generator index of each local generator.
    pub gens: Vec<usize>,
    pub order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    /// Right multiplication by local generator `k`: `gen_mul[e * ngens + k]`.
    gen_mul: Vec<u32>,
    gen_inv_mul: Vec<u32>,
    pub table: CosetTable,
}

impl FiniteGroup {
    fn from_presentation(global: &Presentation, local_gens: &[usize], want: usize) -> Result<Self, CatalogError> {
        let p = global.restrict(local_gens);
        let t = enumerate(&p, &[], default_budget(Some(want)))?;
        let n = t.len();
        let k = local_gens.len();
        let mut gen_mul = vec![0u32; n * k];
        let mut gen_inv_mul = vec![0u32; n * k];
        for e in 0..n {
            for g in 0..k {
                gen_mul[e * k + g] = t.get(e, 2 * g);
                gen_inv_mul[e * k + g] = t.get(e, 2 * g + 1);
            }
        }
        // minimal words from the breadth-first tree of the standard table
        let mut word: Vec<Option<Vec<usize>>> = vec![None; n];
        word[0] = Some(vec![]);
        let mut queue = vec![0usize];
        let mut qi = 0;
        while qi < queue.len() {
            let e = queue[qi];
            qi += 1;
            for col in 0..2 * k {
                let f = t.get(e, col) as usize;
                if word[f].is_none() {
                    let mut w = word[e].clone().unwrap();
                    w.push(col);
                    word[f] = Some(w);
                    queue.push(f);
                }
            }
        }
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut r = a;
                for &col in word[b].as_ref().unwrap() {
                    r = t.get(r, col) as usize;
                }
                mul[a * n + b] = r as u32;
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        Ok(FiniteGroup { gens: local_gens.to_vec(), order: n, mul, inv, gen_mul, gen_inv_mul, table: t })
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    fn local(&self, global_gen: usize) -> Option<usize> {
        self.gens.iter().position(|&g| g == global_gen)
    }

    fn times_letter(&self, e: u32, l: Letter) -> u32 {
        let k = self.local(l.gen).expect("letter not in factor");
        let idx = e as usize * self.gens.len() + k;
        if l.inv {
            self.gen_inv_mul[idx]
        } else {
            self.gen_mul[idx]
        }
    }

    /// Regular permutation representation, one permutation per local generator.
    pub fn regular_perms(&self) -> Vec<crate::perm::Perm> {
        let k = self.gens.len();
        (0..k)
            .map(|g| crate::perm::Perm::from_images((0..self.order).map(|e| self.gen_mul[e * k + g]).collect()))
            .collect()
    }
}

/// A and B as concrete groups, with C identified inside both.
#[derive(Debug)]
pub struct Factors {
    pub a: FiniteGroup,
    pub b: FiniteGroup,
    /// C as elements of A and of B; `c_in_a[i]` and `c_in_b[i]` are the same element.
    pub c_in_a: Vec<u32>,
    pub c_in_b: Vec<u32>,
    /// Left-coset decomposition `x = t·c`: (representative, C-index) for every element.
    decomp_a: Vec<(u32, u32)>,
    decomp_b: Vec<(u32, u32)>,
}

impl Factors {
    fn build(spec: &AmalgamSpec) -> Result<Factors, CatalogError> {
        let p = &spec.presentation;
        let mut ag: Vec<usize> = spec.a_gens.clone();
        let mut bg: Vec<usize> = spec.b_gens.clone();
        for &c in &spec.c_gens {
            if !ag.contains(&c) {
                ag.push(c);
            }
            if !bg.contains(&c) {
                bg.push(c);
            }
        }
        ag.sort_unstable();
        bg.sort_unstable();
        let a = FiniteGroup::from_presentation(p, &ag, spec.stab.0)?;
        let b = FiniteGroup::from_presentation(p, &bg, spec.stab.1)?;
        for (lbl, g, want) in [("A", &a, spec.stab.0), ("B", &b, spec.stab.1)] {
            if g.order != want {
                return Err(CatalogError::StabOrder {
                    class: spec.id.clone(),
                    label: lbl.into(),
                    got: g.order,
                    want,
                });
            }
        }
        // identify C in both factors by walking the same words
        let mut c_in_a = vec![0u32];
        let mut c_in_b = vec![0u32];
        let mut seen_a = BTreeMap::from([(0u32, 0usize)]);
        let mut i = 0;
        while i < c_in_a.len() {
            for &g in &spec.c_gens {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    let fa = a.times_letter(c_in_a[i], l);
                    let fb = b.times_letter(c_in_b[i], l);
                    match seen_a.get(&fa) {
                        Some(&j) => {
                            if c_in_b[j] != fb {
                                return Err(CatalogError::Data {
                                    line: 0,
                                    msg: format!("{}: C is not identified consistently in A and B", spec.id),
                                });
                            }
                        }
                        None => {
                            seen_a.insert(fa, c_in_a.len());
                            c_in_a.push(fa);
                            c_in_b.push(fb);
                        }
                    }
                }
            }
            i += 1;
        }
        if c_in_a.len() != spec.stab.2 || c_in_b.iter().collect::<BTreeSet<_>>().len() != spec.stab.2 {
            return Err(CatalogError::StabOrder {
                class: spec.id.clone(),
                label: "C".into(),
                got: c_in_a.len(),
                want: spec.stab.2,
            });
        }
        let decomp_a = decompose(&a, &c_in_a);
        let decomp_b = decompose(&b, &c_in_b);
        Ok(Factors { a, b, c_in_a, c_in_b, decomp_a, decomp_b })
    }
}

/// Representatives are the smallest-numbered element of each left coset `tC`,
/// which is the shortlex-least word in that coset.
fn decompose(g: &FiniteGroup, c: &[u32]) -> Vec<(u32, u32)> {
    let mut out = vec![(u32::MAX, 0u32); g.order];
    for t in 0..g.order as u32 {
        if out[t as usize].0 != u32::MAX {
            continue;
        }
        for (ci, &ce) in c.iter().enumerate() {
            let x = g.mul(t, ce);
            out[x as usize] = (t, ci as u32);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

/// Normal form `t₁ t₂ … t_k · c` with alternating non-trivial coset representatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmalgamElement {
    pub syllables: Vec<(Side, u32)>,
    /// Index into the C element list.
    pub c: u32,
}

impl AmalgamElement {
    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty() && self.c == 0
    }
}

pub fn amalgam_normal_form(spec: &AmalgamSpec, w: &Word) -> Result<AmalgamElement, CatalogError> {
    let f = spec.factors()?;
    let mut syl: Vec<(Side, u32)> = Vec::new();
    let mut c: u32 = 0;
    for &l in w.letters() {
        if l.gen >= spec.presentation.ngens() {
            return Err(CatalogError::Word(FpError::OutOfRange(l.gen)));
        }
        let side = if f.a.local(l.gen).is_some() { Side::A } else { Side::B };
        let (g, cset, dec) = match side {
            Side::A => (&f.a, &f.c_in_a, &f.decomp_a),
            Side::B => (&f.b, &f.c_in_b, &f.decomp_b),
        };
        let x = g.times_letter(cset[c as usize], l);
        match syl.last() {
            Some(&(s, t)) if s == side => {
                let y = g.mul(t, x);
                let (t2, c2) = dec[y as usize];
                syl.pop();
                if t2 != 0 {
                    syl.push((side, t2));
                }
                c = c2;
            }
            _ => {
                let (t2, c2) = dec[x as usize];
                if t2 != 0 {
                    syl.push((side, t2));
                }
                c = c2;
            }
        }
    }
    Ok(AmalgamElement { syllables: syl, c })
}

/// Exact group order described by a product/quotient of integers, factorials and powers.
pub fn parse_order_expr(s: &str) -> Option<BigUint> {
    fn term(t: &str) -> Option<BigUint> {
        let t = t.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|x| x.split_once(')')) {
            let (body, rest) = inner;
            let v = parse_order_expr(body)?;
            return match rest.strip_prefix('^') {
                Some(e) => Some(v.pow(e.parse().ok()?)),
                None if rest.is_empty() => Some(v),
                None => None,
            };
        }
        if let Some(n) = t.strip_suffix('!') {
            let n: u32 = n.parse().ok()?;
            return Some((1..=n).fold(BigUint::one(), |a, k| a * BigUint::from(k)));
        }
        if let Some((b, e)) = t.split_once('^') {
            let b: BigUint = b.parse().ok()?;
            return Some(b.pow(e.parse().ok()?));
        }
        t.parse().ok()
    }
    // split on top-level * and /
    let mut acc = BigUint::one();
    let mut depth = 0;
    let mut start = 0;
    let mut op = '*';
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut pieces = Vec::new();
    while i <= bytes.len() {
        let ch = bytes.get(i).copied();
        match ch {
            Some('(') => depth += 1,
            Some(')') => depth -= 1,
            _ => {}
        }
        if ch.is_none() || (depth == 0 && (ch == Some('*') || ch == Some('/'))) {
            let piece: String = bytes[start..i].iter().collect();
            pieces.push((op, piece));
            if let Some(c) = ch {
                op = c;
            }
            start = i + 1;
        }
        i += 1;
    }
    for (op, p) in pieces {
        let v = term(&p)?;
        if op == '*' {
            acc *= v;
        } else {
            if (&acc % &v) != BigUint::from(0u32) {
                return None;
            }
            acc /= v;
        }
    }
    Some(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreDescriptor {
    /// Quotient by a normal subgroup; its order is the index.
    Quotient,
    Named { name: String, order: BigUint },
    UncheckedLarge(String),
}

impl fmt::Display for CoreDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreDescriptor::Quotient => f.write_str("quotient"),
            CoreDescriptor::Named { name, .. } => f.write_str(name),
            CoreDescriptor::UncheckedLarge(n) => write!(f, "{}(unchecked)", n),
        }
    }
}

#[derive(Clone, Debug)]
pub struct InclusionRecord {
    pub sub: String,
    pub sup: String,
    /// One word over the super-class generators per sub-class generator.
    pub images: Vec<Word>,
    pub index: usize,
    pub normal: bool,
    pub class_size: usize,
    pub core: CoreDescriptor,
    /// Conjugation actions: a super-group element and the images of the sub-generators
    /// under conjugation by it, written over the sub-generators.
    pub conjugations: Vec<(Word, Vec<Word>)>,
}

impl InclusionRecord {
    pub fn expected_core_order(&self) -> Option<BigUint> {
        match &self.core {
            CoreDescriptor::Quotient => Some(BigUint::from(self.index)),
            CoreDescriptor::Named { order, .. } => Some(order.clone()),
            CoreDescriptor::UncheckedLarge(_) => None,
        }
    }
}

pub struct Catalog {
    specs: Vec<AmalgamSpec>,
    ledger: Vec<InclusionRecord>,
}

static CATALOG: OnceLock<Catalog> = OnceLock::new();

/// The shipped catalog, parsed once.
pub fn catalog() -> &'static Catalog {
    CATALOG.get_or_init(|| Catalog::parse(AMALGAMS, INCLUSIONS).expect("shipped catalog data is valid"))
}

impl Catalog {
    pub fn parse(amalgams: &str, inclusions: &str) -> Result<Catalog, CatalogError> {
        let specs = parse_amalgams(amalgams)?;
        let mut cat = Catalog { specs, ledger: vec![] };
        cat.ledger = parse_inclusions(&cat, inclusions)?;
        Ok(cat)
    }

    pub fn specs(&self) -> &[AmalgamSpec] {
        &self.specs
    }

    pub fn get(&self, id: &str) -> Result<&AmalgamSpec, CatalogError> {
        let norm = normalize_id(id);
        self.specs
            .iter()
            .find(|s| s.id == norm)
            .ok_or_else(|| CatalogError::UnknownClass(id.to_string()))
    }

    pub fn ledger(&self) -> &[InclusionRecord] {
        &self.ledger
    }

    /// Records with `filter` as sub-class, or as super-class when `as_super` is set.
    pub fn list_inclusions(&self, filter: Option<&str>, as_super: bool) -> Result<Vec<&InclusionRecord>, CatalogError> {
        match filter {
            None => Ok(self.ledger.iter().collect()),
            Some(id) => {
                let id = self.get(id)?.id.clone();
                Ok(self
                    .ledger
                    .iter()
                    .filter(|r| if as_super { r.sup == id } else { r.sub == id })
                    .collect())
            }
        }
    }
}

/// Accepts `G2^1`, `G21`, `g2^1`, `DjM4^2` and the like.
pub fn normalize_id(id: &str) -> String {
    let t = id.trim();
    let lower = t.to_ascii_lowercase();
    let (prefix, rest) = if let Some(r) = lower.strip_prefix("djm") {
        ("DjM", r)
    } else if let Some(r) = lower.strip_prefix('g') {
        ("G", r)
    } else {
        return t.to_string();
    };
    let rest = rest.replace(['_', '{', '}'], "");
    let (main, sup) = match rest.split_once('^') {
        Some((m, s)) => (m.to_string(), Some(s.to_string())),
        None if rest.len() == 2 => (rest[..1].to_string(), Some(rest[1..].to_string())),
        None => (rest.clone(), None),
    };
    match sup {
        Some(s) => format!("{}{}^{}", prefix, main, s),
        None => format!("{}{}", prefix, main),
    }
}

fn parse_amalgams(text: &str) -> Result<Vec<AmalgamSpec>, CatalogError> {
    let mut out = Vec::new();
    let mut cur: Option<BTreeMap<String, Vec<String>>> = None;
    let mut start = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line.split_once(' ').map(|(k, v)| (k, v.trim())).unwrap_or((line, ""));
        match key {
            "class" => {
                cur = Some(BTreeMap::from([("class".to_string(), vec![val.to_string()])]));
                start = ln + 1;
            }
            "end" => {
                let block = cur.take().ok_or(CatalogError::Data { line: ln + 1, msg: "stray end".into() })?;
                out.push(build_spec(&block, start)?);
            }
            _ => {
                let block = cur.as_mut().ok_or(CatalogError::Data { line: ln + 1, msg: "outside class".into() })?;
                block.entry(key.to_string()).or_default().push(val.to_string());
            }
        }
    }
    Ok(out)
}

fn build_spec(block: &BTreeMap<String, Vec<String>>, line: usize) -> Result<AmalgamSpec, CatalogError> {
    let err = |msg: &str| CatalogError::Data { line, msg: msg.to_string() };
    let one = |k: &str| -> Result<&str, CatalogError> {
        block.get(k).and_then(|v| v.first()).map(|s| s.as_str()).ok_or_else(|| err(&format!("missing `{}`", k)))
    };
    let id = one("class")?.to_string();
    let kind = match one("kind")? {
        "arc-transitive" => Kind::ArcTransitive,
        "semisymmetric" => Kind::Semisymmetric,
        _ => return Err(err("bad kind")),
    };
    let gens: Vec<&str> = one("gens")?.split_whitespace().collect();
    let mut p = Presentation::new(&gens)?;
    for r in block.get("rel").map(|v| v.as_slice()).unwrap_or(&[]) {
        p.add_relator(r)?;
    }
    let sub = |k: &str| -> Result<Vec<usize>, CatalogError> {
        let s = block.get(k).and_then(|v| v.first()).map(|s| s.as_str()).unwrap_or("");
        s.split_whitespace()
            .map(|g| p.gen_index(g).ok_or_else(|| CatalogError::Word(FpError::UnknownSymbol(g.into()))))
            .collect()
    };
    let a_gens = sub("A")?;
    let b_gens = sub("B")?;
    let c_gens = sub("C")?;
    for (lbl, g) in [("A", &a_gens), ("B", &b_gens), ("C", &c_gens)] {
        let words: Vec<String> = g.iter().map(|&i| p.gens[i].clone()).collect();
        let refs: Vec<&str> = words.iter().map(|s| s.as_str()).collect();
        p.set_subgroup(lbl, &refs)?;
    }
    let nums = |k: &str| -> Result<Vec<usize>, CatalogError> {
        one(k)?.split_whitespace().map(|x| x.parse().map_err(|_| err("bad number"))).collect()
    };
    let st = nums("stab")?;
    if st.len() != 3 {
        return Err(err("stab needs three orders"));
    }
    let s = nums("s")?;
    let local_s = match s.as_slice() {
        [a] => LocalS::Single(*a as u32),
        [a, b] => LocalS::Pair(*a as u32, *b as u32),
        _ => return Err(err("bad s")),
    };
    let iso_v: Vec<Option<String>> = one("iso")?
        .split_whitespace()
        .map(|x| if x == "-" { None } else { Some(x.to_string()) })
        .collect();
    if iso_v.len() != 3 {
        return Err(err("iso needs three entries"));
    }
    let variants = block
        .get("variant")
        .map(|v| v.iter().map(|w| p.parse_word(w)).collect::<Result<Vec<_>, _>>())
        .transpose()?
        .unwrap_or_default();
    p.metadata = format!("{} ({})", id, kind);
    Ok(AmalgamSpec {
        id,
        kind,
        presentation: p,
        a_gens,
        b_gens,
        c_gens,
        stab: (st[0], st[1], st[2]),
        local_s,
        iso: [iso_v[0].clone(), iso_v[1].clone(), iso_v[2].clone()],
        variants,
        groups: OnceLock::new(),
    })
}

fn parse_inclusions(cat: &Catalog, text: &str) -> Result<Vec<InclusionRecord>, CatalogError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| CatalogError::Data { line: ln + 1, msg: m.to_string() };
        let fields: Vec<&str> = line.split('|').map(|f| f.trim()).collect();
        if fields.len() < 5 {
            return Err(err("expected at least five fields"));
        }
        let (sub, sup) = fields[0].split_once("<=").ok_or_else(|| err("expected SUB <= SUPER"))?;
        let sub = cat.get(sub.trim())?;
        let sup = cat.get(sup.trim())?;
        let images = fields[1]
            .split_whitespace()
            .map(|w| sup.presentation.parse_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        if images.len() != sub.presentation.ngens() {
            return Err(err("image count does not match sub-class generators"));
        }
        let index: usize = fields[2].parse().map_err(|_| err("bad index"))?;
        let (normal, class_size) = match fields[3] {
            "normal" => (true, 1),
            c => {
                let n = c.strip_prefix("class=").ok_or_else(|| err("expected normal or class=N"))?;
                (false, n.parse().map_err(|_| err("bad class size"))?)
            }
        };
        let core_s = fields[4].strip_prefix("core=").ok_or_else(|| err("expected core="))?;
        let core = if core_s == "quotient" {
            CoreDescriptor::Quotient
        } else {
            let (name, ord) = core_s.rsplit_once(':').ok_or_else(|| err("expected NAME:ORDER"))?;
            if ord == "unchecked" {
                CoreDescriptor::UncheckedLarge(name.into())
            } else {
                let order = parse_order_expr(ord).ok_or_else(|| err("bad order expression"))?;
                CoreDescriptor::Named { name: name.into(), order }
            }
        };
        out.push(InclusionRecord {
            sub: sub.id.clone(),
            sup: sup.id.clone(),
            images,
            index,
            normal,
            class_size,
            core,
            conjugations: match fields.get(5) {
                Some(n) => parse_conjugations(n, sub, sup).map_err(|_| err("bad conjugation note"))?,
                None => vec![],
            },
        });
    }
    Ok(out)
}

fn parse_conjugations(
    text: &str,
    sub: &AmalgamSpec,
    sup: &AmalgamSpec,
) -> Result<Vec<(Word, Vec<Word>)>, FpError> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let (g, ws) = part.split_once(':').ok_or(FpError::Parse { pos: 0, msg: "expected g: words".into() })?;
        let g = sup.presentation.parse_word(g.trim())?;
        let ws = ws.split_whitespace().map(|w| sub.presentation.parse_word(w)).collect::<Result<Vec<_>, _>>()?;
        if ws.len() != sub.presentation.ngens() {
            return Err(FpError::Parse { pos: 0, msg: "one word per sub-generator".into() });
        }
        out.push((g, ws));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Relators,
    Index,
    EdgeTransitive,
    Normality,
    CoreOrder,
    Conjugation,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Relators => "relators",
            Check::Index => "index",
            Check::EdgeTransitive => "edge-transitive",
            Check::Normality => "normality",
            Check::CoreOrder => "core",
            Check::Conjugation => "conjugation",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub sub: String,
    pub sup: String,
    pub index: Option<usize>,
    pub normal: Option<bool>,
    pub class_size: Option<usize>,
    pub core_order: Option<BigUint>,
    /// First failing check with a witness.
    pub failure: Option<(Check, String)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "?".into());
        write!(
            f,
            "{}<={} index={} normal={} class={} core={} : ",
            self.sub,
            self.sup,
            opt(self.index.map(|v| v.to_string())),
            opt(self.normal.map(|v| v.to_string())),
            opt(self.class_size.map(|v| v.to_string())),
            opt(self.core_order.as_ref().map(|v| v.to_string())),
        )?;
        match &self.failure {
            None => write!(f, "PASS"),
            Some((c, _)) => write!(f, "FAIL({})", c),
        }
    }
}

/// Run the five independent checks on one ledger record.
pub fn verify_inclusion(rec: &InclusionRecord) -> Result<VerificationReport, CatalogError> {
    let cat = catalog();
    let sub = cat.get(&rec.sub)?;
    let sup = cat.get(&rec.sup)?;
    let mut rep = VerificationReport {
        sub: rec.sub.clone(),
        sup: rec.sup.clone(),
        index: None,
        normal: None,
        class_size: None,
        core_order: None,
        failure: None,
    };
    // (1) relator images are trivial in the amalgam
    for r in &sub.presentation.relators {
        let img = substitute_all(r, &rec.images)?;
        if !amalgam_normal_form(sup, &img)?.is_identity() {
            rep.failure = Some((Check::Relators, sub.presentation.format_word(r)));
            return Ok(rep);
        }
    }
    // conjugation actions stated alongside the record: g⁻¹·h·g = w(h)
    for (g, ws) in &rec.conjugations {
        for (h, w) in rec.images.iter().zip(ws) {
            let lhs = g.inverse().concat(h).concat(g);
            let rhs = substitute_all(w, &rec.images)?;
            if !amalgam_normal_form(sup, &lhs.concat(&rhs.inverse()))?.is_identity() {
                rep.failure = Some((Check::Conjugation, sup.presentation.format_word(g)));
                return Ok(rep);
            }
        }
    }
    // (2) index
    let t = match enumerate(&sup.presentation, &rec.images, default_budget(Some(rec.index))) {
        Ok(t) => t,
        Err(e) => {
            rep.failure = Some((Check::Index, e.to_string()));
            return Ok(rep);
        }
    };
    rep.index = Some(t.len());
    if t.len() != rec.index {
        rep.failure = Some((Check::Index, format!("{} cosets", t.len())));
        return Ok(rep);
    }
    let perms = t.permutation_image()?;
    // (3) the stabiliser of the relevant arc or edge is transitive on cosets
    let stab_gens: &[usize] = if sub.kind == Kind::ArcTransitive { &sup.c_gens } else { sup.edge_stab_gens() };
    let g = crate::permgroup::PermGroup::new(t.len(), stab_gens.iter().map(|&i| perms[i].clone()).collect());
    if !g.is_transitive() {
        rep.failure = Some((Check::EdgeTransitive, format!("{} orbits", g.orbits(None).len())));
        return Ok(rep);
    }
    // (4) normality and class size via the normaliser N: |N:H| = cosets fixed by H
    let h_perms: Vec<crate::perm::Perm> = rec
        .images
        .iter()
        .map(|w| {
            let mut p = crate::perm::Perm::identity(t.len());
            for l in w.letters() {
                let q = if l.inv { perms[l.gen].inverse() } else { perms[l.gen].clone() };
                p = p.mul(&q);
            }
            p
        })
        .collect();
    let fixed = (0..t.len() as u32).filter(|&i| h_perms.iter().all(|p| p.apply(i) == i)).count();
    let class = t.len() / fixed;
    let normal = fixed == t.len();
    rep.normal = Some(normal);
    rep.class_size = Some(class);
    if normal != rec.normal || class != rec.class_size {
        rep.failure = Some((Check::Normality, format!("normaliser index {}", fixed)));
        return Ok(rep);
    }
    // (5) order of G/core(H)
    let q = t.core_quotient()?;
    let ord = q.order();
    rep.core_order = Some(ord.clone());
    if let Some(want) = rec.expected_core_order() {
        if ord != want {
            rep.failure = Some((Check::CoreOrder, format!("expected {}", want)));
        }
    }
    Ok(rep)
}

/// Whether two subgroups of equal finite index are conjugate: `K` is conjugate to `H`
/// exactly when `K` fixes some coset of `H`.
pub fn conjugate_subgroups(spec: &AmalgamSpec, h: &[Word], k: &[Word], index: usize) -> Result<bool, CatalogError> {
    let t = enumerate(&spec.presentation, h, default_budget(Some(index)))?;
    let tk = enumerate(&spec.presentation, k, default_budget(Some(index)))?;
    if t.len() != tk.len() {
        return Ok(false);
    }
    Ok((0..t.len()).any(|i| k.iter().all(|w| t.trace(i, w) == Some(i))))
}
