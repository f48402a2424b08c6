//! Amalgam type of an edge-transitive group acting on a cubic graph, and the action
//! type of a graph: the types of all conjugacy classes of edge-transitive subgroups
//! of its automorphism group.

use crate::catalog::{catalog, AmalgamSpec, Kind, LocalS};
use crate::graph::CubicGraph;
use crate::graph_aut::{automorphism_group, edge_orbit_count, symmetry_with, SymmetryKind};
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use crate::smallgroups::{identify, CayleyGroup};
use num_bigint::BigUint;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("group is not edge-transitive")]
    NotEdgeTransitive,
    #[error("stabiliser data matches no class: {0}")]
    NoMatch(String),
    #[error("stabiliser data matches several classes: {0:?}")]
    Ambiguous(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAssignment {
    pub class: String,
    pub kind: Kind,
    /// `(s_u, s_v)` oriented so that `s_u` belongs to the part stabilised by A.
    pub local_s: LocalS,
    /// True when vertex 0 lies in the part stabilised by B.
    pub swapped: bool,
    /// Isomorphism types of the vertex stabilisers, in the order of `local_s`.
    pub vertex_stab: Vec<String>,
    pub vertex_stab_order: usize,
    pub edge_stab_order: usize,
    pub group_order: BigUint,
}

impl fmt::Display for TypeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type={} s={} |G|={}", self.class, self.local_s, self.group_order)
    }
}

/// Per-class data used to recognise a group: stabiliser type names and whether the
/// edge stabiliser splits over the arc stabiliser.
struct ClassData {
    a_name: String,
    b_name: String,
    reversing_involution: bool,
}

fn class_data() -> &'static HashMap<String, ClassData> {
    static DATA: OnceLock<HashMap<String, ClassData>> = OnceLock::new();
    DATA.get_or_init(|| {
        let mut out = HashMap::new();
        for s in catalog().specs() {
            let f = s.factors().expect("catalog stabilisers enumerate");
            let name = |perms: Vec<Perm>, order: usize| identify(&CayleyGroup::from_perms(&perms, order).expect("small"));
            let c: BTreeSet<u32> = f.c_in_b.iter().copied().collect();
            let reversing_involution = (0..f.b.order as u32).any(|e| !c.contains(&e) && f.b.mul(e, e) == 0);
            out.insert(
                s.id.clone(),
                ClassData {
                    a_name: name(f.a.regular_perms(), f.a.order),
                    b_name: name(f.b.regular_perms(), f.b.order),
                    reversing_involution,
                },
            );
        }
        out
    })
}

fn stab_name(grp: &PermGroup) -> String {
    grp.identify_small().unwrap_or_else(|e| format!("order {}", e.0))
}

/// An `s`-arc starting at `u`: each step takes the first neighbour that does not backtrack.
fn greedy_arc(g: &CubicGraph, u: u32, s: usize) -> Vec<u32> {
    let mut arc = vec![u];
    for i in 0..s {
        let v = arc[i];
        let prev = if i > 0 { Some(arc[i - 1]) } else { None };
        let next = *g.neighbors(v).iter().find(|&&x| Some(x) != prev).unwrap();
        arc.push(next);
    }
    arc
}

/// Largest `s` with `G_u` transitive on the `s`-arcs starting at `u` (capped at 9).
pub fn local_s(g: &CubicGraph, grp: &PermGroup, u: u32) -> Result<u32, ClassifyError> {
    if crate::graph_aut::edge_orbit_count(g, grp) != 1 {
        return Err(ClassifyError::NotEdgeTransitive);
    }
    let gu = grp.stabilizer(u).order();
    let mut s = 0;
    while s < 9 {
        let arc = greedy_arc(g, u, s + 1);
        let arcs = BigUint::from(3u32 << s);
        let fix = grp.stabilizer_of_points(&arc).order();
        if &gu / fix != arcs {
            break;
        }
        s += 1;
    }
    Ok(s as u32)
}

/// Elements of `grp` swapping the ends of the edge `{u, w}`.
fn edge_reversers(grp: &PermGroup, u: u32, w: u32) -> Vec<Perm> {
    let chain = grp.chain_with_base(&[u]);
    if !chain.basic_orbit(0).contains(&w) {
        return vec![];
    }
    let t = chain.transversal(0, w);
    let target = t.inverse().apply(u);
    grp.stabilizer(u)
        .elements()
        .into_iter()
        .filter(|h| h.apply(w) == target)
        .map(|h| h.mul(&t))
        .collect()
}

/// Type of the edge-transitive group `grp` acting on `g`.
pub fn classify_group(g: &CubicGraph, grp: &PermGroup) -> Result<TypeAssignment, ClassifyError> {
    let sym = symmetry_with(g, grp);
    let order = grp.order();
    let n = g.n();
    let u = 0u32;
    let w = g.neighbors(u)[0];
    let data = class_data();
    match sym.kind {
        SymmetryKind::Neither => Err(ClassifyError::NotEdgeTransitive),
        SymmetryKind::ArcTransitive => {
            let s = local_s(g, grp, u)?;
            let gu = grp.stabilizer(u);
            let stab_order = usize::try_from(&order / BigUint::from(n)).unwrap();
            let splits = edge_reversers(grp, u, w).iter().any(|x| x.mul(x).is_identity());
            let cands: Vec<&AmalgamSpec> = catalog()
                .specs()
                .iter()
                .filter(|c| c.kind == Kind::ArcTransitive && c.local_s == LocalS::Single(s) && c.stab.0 == stab_order)
                .filter(|c| data[&c.id].reversing_involution == splits)
                .collect();
            let spec = unique(cands, || format!("arc-transitive s={s} |G_v|={stab_order} split={splits}"))?;
            Ok(TypeAssignment {
                class: spec.id.clone(),
                kind: Kind::ArcTransitive,
                local_s: LocalS::Single(s),
                swapped: false,
                vertex_stab: vec![stab_name(&gu)],
                vertex_stab_order: stab_order,
                edge_stab_order: stab_order * 2 / 3,
                group_order: order,
            })
        }
        SymmetryKind::Semisymmetric => {
            let half = BigUint::from(n / 2);
            let stab_order = usize::try_from(&order / &half).unwrap();
            let (su, sw) = (local_s(g, grp, u)?, local_s(g, grp, w)?);
            let (nu, nw) = (stab_name(&grp.stabilizer(u)), stab_name(&grp.stabilizer(w)));
            let mut hits = Vec::new();
            for spec in catalog().specs().iter().filter(|c| c.kind == Kind::Semisymmetric && c.stab.0 == stab_order) {
                let d = &data[&spec.id];
                for swapped in [false, true] {
                    let (sa, sb, na, nb) = if swapped { (sw, su, &nw, &nu) } else { (su, sw, &nu, &nw) };
                    if spec.local_s == LocalS::Pair(sa, sb) && &d.a_name == na && &d.b_name == nb {
                        hits.push((spec, swapped, sa, sb, na.clone(), nb.clone()));
                        break;
                    }
                }
            }
            if hits.len() > 1 {
                return Err(ClassifyError::Ambiguous(hits.iter().map(|h| h.0.id.clone()).collect()));
            }
            let (spec, swapped, sa, sb, na, nb) = hits.pop().ok_or_else(|| {
                ClassifyError::NoMatch(format!("semisymmetric s=({su},{sw}) |G_v|={stab_order} stabilisers {nu}, {nw}"))
            })?;
            Ok(TypeAssignment {
                class: spec.id.clone(),
                kind: Kind::Semisymmetric,
                local_s: LocalS::Pair(sa, sb),
                swapped,
                vertex_stab: vec![na, nb],
                vertex_stab_order: stab_order,
                edge_stab_order: stab_order / 3,
                group_order: order,
            })
        }
    }
}

fn unique(mut cands: Vec<&AmalgamSpec>, describe: impl Fn() -> String) -> Result<&AmalgamSpec, ClassifyError> {
    match cands.len() {
        0 => Err(ClassifyError::NoMatch(describe())),
        1 => Ok(cands.pop().unwrap()),
        _ => Err(ClassifyError::Ambiguous(cands.iter().map(|c| c.id.clone()).collect())),
    }
}

/// Type of a graph under its full automorphism group.
pub fn classify(g: &CubicGraph) -> Result<TypeAssignment, ClassifyError> {
    classify_group(g, &automorphism_group(g))
}

// ---------------------------------------------------------------------------
// action types

/// Class ids, one per conjugacy class of edge-transitive subgroups, in catalog order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionType {
    /// Kind of the full automorphism group.
    pub kind: Kind,
    /// Both kinds of subgroup; an arc-transitive graph may also carry semisymmetric ones.
    pub classes: Vec<String>,
    /// False when the subgroup search hit its budget.
    pub complete: bool,
}

impl ActionType {
    pub fn from_classes(kind: Kind, mut classes: Vec<String>, complete: bool) -> ActionType {
        let pos = |id: &str| catalog().specs().iter().position(|s| s.id == id).unwrap_or(usize::MAX);
        classes.sort_by_key(|c| pos(c));
        ActionType { kind, classes, complete }
    }

    /// Classes of the same kind as the full group, the list conventionally quoted.
    pub fn own_kind(&self) -> Vec<&str> {
        let kind_of = |id: &str| catalog().get(id).map(|s| s.kind).ok();
        self.classes.iter().map(|c| c.as_str()).filter(|c| kind_of(c) == Some(self.kind)).collect()
    }
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.own_kind().join(","))?;
        if !self.complete {
            write!(f, "+?")?;
        }
        Ok(())
    }
}

/// A small group held as an explicit element list with bitset subgroups.
struct Finite {
    elems: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

type Bits = Vec<u64>;

impl Finite {
    fn new(elems: Vec<Perm>) -> Finite {
        let index = elems.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Finite { elems, index }
    }

    fn bits_of(&self, items: &[usize]) -> Bits {
        let mut b = vec![0u64; self.elems.len().div_ceil(64)];
        for &i in items {
            b[i / 64] |= 1 << (i % 64);
        }
        b
    }

    fn members(&self, b: &Bits) -> Vec<usize> {
        (0..self.elems.len()).filter(|&i| b[i / 64] >> (i % 64) & 1 == 1).collect()
    }

    fn closure(&self, gens: &[usize]) -> Bits {
        let id = self.index[&Perm::identity(self.elems[0].degree())];
        let mut list = vec![id];
        let mut b = self.bits_of(&list);
        let mut k = 0;
        while k < list.len() {
            for &g in gens {
                let x = self.index[&self.elems[list[k]].mul(&self.elems[g])];
                if b[x / 64] >> (x % 64) & 1 == 0 {
                    b[x / 64] |= 1 << (x % 64);
                    list.push(x);
                }
            }
            k += 1;
        }
        b
    }

    /// All subgroups as bitsets, or `None` past `budget` subgroups.
    fn subgroups(&self, budget: usize) -> Option<Vec<Bits>> {
        let mut seen: std::collections::HashSet<Bits> = std::collections::HashSet::new();
        let triv = self.closure(&[]);
        seen.insert(triv.clone());
        let mut list = vec![(triv, vec![])];
        let mut i = 0;
        while i < list.len() {
            let (h, gens): (Bits, Vec<usize>) = list[i].clone();
            for x in 0..self.elems.len() {
                if h[x / 64] >> (x % 64) & 1 == 1 {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(x);
                let j = self.closure(&g2);
                if seen.insert(j.clone()) {
                    if seen.len() > budget {
                        return None;
                    }
                    list.push((j, g2));
                }
            }
            i += 1;
        }
        Some(list.into_iter().map(|(b, _)| b).collect())
    }
}

fn transitive_on(elems: &[&Perm], pts: &[u32]) -> bool {
    let mut orb = vec![pts[0]];
    let mut k = 0;
    while k < orb.len() {
        for e in elems {
            let y = e.apply(orb[k]);
            if !orb.contains(&y) {
                orb.push(y);
            }
        }
        k += 1;
    }
    pts.iter().all(|p| orb.contains(p))
}

fn sorted_conj(elems: &[Perm], g: &Perm) -> Vec<Perm> {
    let gi = g.inverse();
    let mut v: Vec<Perm> = elems.iter().map(|x| gi.mul(x).mul(g)).collect();
    v.sort();
    v
}

/// Default bound on the number of subgroups enumerated per stabiliser.
pub const ACTION_TYPE_BUDGET: usize = 20_000;

/// Action type of `g`: every edge-transitive subgroup of Aut is generated by its
/// stabilisers at a fixed edge `{u, w}`, so candidates are pairs of subgroups of the
/// stabilisers; conjugacy is tested by the setwise stabiliser of that edge.
pub fn action_type(g: &CubicGraph, budget: usize) -> Result<ActionType, ClassifyError> {
    let aut = automorphism_group(g);
    action_type_in(g, &aut, budget)
}

pub fn action_type_in(g: &CubicGraph, aut: &PermGroup, budget: usize) -> Result<ActionType, ClassifyError> {
    let full = classify_group(g, aut)?;
    let (subs, complete) = edge_transitive_subgroups(g, aut, budget)?;
    let at = ActionType::from_classes(full.kind, subs.into_iter().map(|(c, _)| c).collect(), complete);
    debug_assert!(at.classes.contains(&full.class));
    Ok(at)
}

/// One representative per conjugacy class of edge-transitive subgroups of `aut`, with
/// its class id, and whether the enumeration finished within `budget`.
pub fn edge_transitive_subgroups(g: &CubicGraph, aut: &PermGroup, budget: usize) -> Result<(Vec<(String, PermGroup)>, bool), ClassifyError> {
    if edge_orbit_count(g, aut) != 1 {
        return Err(ClassifyError::NotEdgeTransitive);
    }
    let u = 0u32;
    let w = g.neighbors(u)[0];
    let nu: Vec<u32> = g.neighbors(u).to_vec();
    let nw: Vec<u32> = g.neighbors(w).to_vec();
    let au = Finite::new(aut.stabilizer(u).elements());
    let aw = Finite::new(aut.stabilizer(w).elements());
    let reversers = edge_reversers(aut, u, w);
    let mut edge_elems = aut.stabilizer_of_points(&[u, w]).elements();
    edge_elems.extend(reversers.iter().cloned());
    let ae = Finite::new(edge_elems);
    let mut complete = true;
    let subs = |f: &Finite, complete: &mut bool| -> Vec<Bits> {
        f.subgroups(budget).unwrap_or_else(|| {
            *complete = false;
            vec![]
        })
    };
    let sub_u = subs(&au, &mut complete);
    let elems_of = |f: &Finite, b: &Bits| -> Vec<Perm> { f.members(b).into_iter().map(|i| f.elems[i].clone()).collect() };
    let fixes = |p: &Perm, x: u32| p.apply(x) == x;
    // stabiliser candidates at u: transitive on N(u), keyed by their arc part
    let cand_u: Vec<(Vec<Perm>, Vec<Perm>)> = sub_u
        .iter()
        .map(|b| elems_of(&au, b))
        .filter(|h| transitive_on(&h.iter().collect::<Vec<_>>(), &nu))
        .map(|h| {
            let mut arc: Vec<Perm> = h.iter().filter(|p| fixes(p, w)).cloned().collect();
            arc.sort();
            (h, arc)
        })
        .collect();
    let setwise: Vec<Perm> = ae.elems.clone();
    let key_of = |hu: &[Perm], hother: &[Perm], at: bool| -> (Vec<Perm>, Vec<Perm>) {
        setwise
            .iter()
            .filter(|x| !at || x.apply(u) == u)
            .map(|x| {
                if x.apply(u) == u {
                    (sorted_conj(hu, x), sorted_conj(hother, x))
                } else {
                    (sorted_conj(hother, x), sorted_conj(hu, x))
                }
            })
            .min()
            .unwrap()
    };
    let mut found: Vec<((Vec<Perm>, Vec<Perm>), PermGroup)> = Vec::new();
    let mut push = |key: (Vec<Perm>, Vec<Perm>), grp: PermGroup| {
        if !found.iter().any(|(k, _)| *k == key) {
            found.push((key, grp));
        }
    };
    let n = g.n();
    let gen_group = |a: &[Perm], b: &[Perm]| -> PermGroup {
        let mut gens: Vec<Perm> = a.iter().chain(b).filter(|p| !p.is_identity()).cloned().collect();
        gens.sort();
        gens.dedup();
        let all = gens.clone();
        PermGroup::new(n, crate::permgroup::small_generating_set(n, &all))
    };
    // semisymmetric subgroups
    if g.two_coloring().is_some() {
        let sub_w = subs(&aw, &mut complete);
        let cand_w: Vec<(Vec<Perm>, Vec<Perm>)> = sub_w
            .iter()
            .map(|b| elems_of(&aw, b))
            .filter(|h| transitive_on(&h.iter().collect::<Vec<_>>(), &nw))
            .map(|h| {
                let mut arc: Vec<Perm> = h.iter().filter(|p| fixes(p, u)).cloned().collect();
                arc.sort();
                (h, arc)
            })
            .collect();
        for (hu, arc_u) in &cand_u {
            for (hw, arc_w) in &cand_w {
                if arc_u != arc_w {
                    continue;
                }
                let h = gen_group(hu, hw);
                let ord = h.order();
                if h.orbits(None).len() != 2 || ord != BigUint::from(hu.len() * n / 2) || ord != BigUint::from(hw.len() * n / 2) {
                    continue;
                }
                push(key_of(hu, hw, false), h);
            }
        }
    }
    // arc-transitive subgroups
    if !reversers.is_empty() {
        let sub_e = subs(&ae, &mut complete);
        for b in &sub_e {
            let he = elems_of(&ae, b);
            if !he.iter().any(|p| p.apply(u) == w) {
                continue;
            }
            let mut arc_e: Vec<Perm> = he.iter().filter(|p| fixes(p, u)).cloned().collect();
            arc_e.sort();
            for (hu, arc_u) in &cand_u {
                if *arc_u != arc_e {
                    continue;
                }
                let h = gen_group(hu, &he);
                if h.order() != BigUint::from(hu.len() * n) {
                    continue;
                }
                push(key_of(hu, &he, true), h);
            }
        }
    }
    let mut out = Vec::new();
    for (_, h) in found {
        out.push((classify_group(g, &h)?.class, h));
    }
    Ok((out, complete))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k33() -> CubicGraph {
        let e: Vec<_> = (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect();
        CubicGraph::from_edges(6, &e).unwrap()
    }

    fn petersen() -> CubicGraph {
        let mut e = Vec::new();
        for i in 0..5u32 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((i + 5, (i + 2) % 5 + 5));
        }
        CubicGraph::from_edges(10, &e).unwrap()
    }

    fn k4() -> CubicGraph {
        CubicGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn small_types() {
        assert_eq!(classify(&k4()).unwrap().class, "DjM2^1");
        assert_eq!(classify(&k33()).unwrap().class, "DjM3");
        assert_eq!(classify(&petersen()).unwrap().class, "DjM3");
        let prism = CubicGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(classify(&prism), Err(ClassifyError::NotEdgeTransitive));
    }

    #[test]
    fn action_types_of_small_graphs() {
        let a = action_type(&petersen(), ACTION_TYPE_BUDGET).unwrap();
        assert_eq!(a.classes, ["DjM2^1", "DjM3"]);
        assert_eq!(a.to_string(), "(DjM2^1,DjM3)");
        let a = action_type(&k33(), ACTION_TYPE_BUDGET).unwrap();
        assert!(a.complete);
        for c in ["DjM1", "DjM2^1", "DjM2^2", "DjM3", "G1", "G1^1", "G1^2", "G1^3"] {
            assert!(a.classes.iter().any(|x| x == c), "{c} missing from {a}");
        }
        assert_eq!(a.own_kind(), ["DjM1", "DjM2^1", "DjM2^2", "DjM3"]);
    }

    #[test]
    fn separator_is_complete() {
        let data = class_data();
        let mut keys = BTreeSet::new();
        for s in catalog().specs() {
            let d = &data[&s.id];
            let key = match s.kind {
                Kind::Semisymmetric => format!("{:?} {} {} {}", s.stab, s.local_s, d.a_name, d.b_name),
                Kind::ArcTransitive => format!("{:?} {} {}", s.stab, s.local_s, d.reversing_involution),
            };
            assert!(keys.insert(key), "{} is not separated", s.id);
        }
    }
}
