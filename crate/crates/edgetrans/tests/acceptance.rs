//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness so
//! the lines always reach the terminal.

use edgetrans::catalog::{catalog, verify_inclusion, Kind, LocalS};
use edgetrans::census::{run_census, Census, CensusConfig, CensusKind, CensusRecord, LiftConfig, Stats};
use edgetrans::classifier::{classify, classify_group, edge_transitive_subgroups, ACTION_TYPE_BUDGET};
use edgetrans::covers::{derived_cover, homology_action, invariant_subspaces, verify_certificate, CoverSpec};
use edgetrans::graph::{hamilton_cycle, is_hamilton_cycle, random_cubic, sparse6_decode, CubicGraph, Hamilton};
use edgetrans::graph_aut::{automorphism_group, canonical_key};
use edgetrans::named;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

// ---------------------------------------------------------------------------
// tolerances and budgets

const ORACLE_MAX_N: usize = 16;
/// Connected cubic graphs on 4, 6, ..., 16 vertices.
const CUBIC_COUNTS: [usize; 7] = [1, 2, 5, 19, 85, 509, 4060];
const HAMILTON_MAX_N: usize = 120;
const HAMILTON_BUDGET: u64 = 50_000_000;
const RANDOM_S6_GRAPHS: usize = 1000;
const MAX_EDGE_STAB: usize = 128;
const MAX_S: u32 = 8;
const MAX_S_ARC_TRANSITIVE: u32 = 5;
/// Sweep of the G1^2 class that finishes at desk scale; the 294-vertex graph is
/// reached through cover lifting.
const G12_CAP: usize = 600;

// ---------------------------------------------------------------------------
// independent graph utilities

type Adj = Vec<[u32; 3]>;

fn adj_of(g: &CubicGraph) -> Adj {
    (0..g.n() as u32).map(|v| *g.neighbors(v)).collect()
}

fn distance_profile(adj: &Adj, s: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[s] = 0;
    let mut q = std::collections::VecDeque::from([s]);
    let mut prof = vec![0u32; adj.len()];
    while let Some(v) = q.pop_front() {
        prof[dist[v] as usize] += 1;
        for &u in &adj[v] {
            if dist[u as usize] == u32::MAX {
                dist[u as usize] = dist[v] + 1;
                q.push_back(u as usize);
            }
        }
    }
    prof
}

struct Profiled {
    adj: Adj,
    vinv: Vec<Vec<u32>>,
    key: Vec<Vec<u32>>,
}

fn profiled(adj: Adj) -> Profiled {
    let vinv: Vec<Vec<u32>> = (0..adj.len()).map(|v| distance_profile(&adj, v)).collect();
    let mut key = vinv.clone();
    key.sort();
    Profiled { adj, vinv, key }
}

/// Backtracking search for an isomorphism `a -> b` honouring the pinned pairs,
/// extending along a BFS order of `a`. Edge multiplicities must agree.
fn iso_from(a: &Profiled, b: &Profiled, pins: &[(u32, u32)]) -> bool {
    let n = a.adj.len();
    if n != b.adj.len() {
        return false;
    }
    let mut order = vec![pins[0].0];
    let mut seen = vec![false; n];
    seen[pins[0].0 as usize] = true;
    let mut i = 0;
    while i < order.len() {
        for &u in &a.adj[order[i] as usize] {
            if !seen[u as usize] {
                seen[u as usize] = true;
                order.push(u);
            }
        }
        i += 1;
    }
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    fn rec(a: &Profiled, b: &Profiled, order: &[u32], k: usize, map: &mut [u32], used: &mut [bool], pins: &[(u32, u32)]) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k] as usize;
        let cands: Vec<u32> = if let Some(&(_, t)) = pins.iter().find(|p| p.0 as usize == v) {
            vec![t]
        } else {
            let parent = a.adj[v].iter().find(|&&u| map[u as usize] != u32::MAX).copied();
            match parent {
                Some(p) => b.adj[map[p as usize] as usize].to_vec(),
                None => (0..b.adj.len() as u32).collect(),
            }
        };
        for c in cands {
            if used[c as usize] || a.vinv[v] != b.vinv[c as usize] {
                continue;
            }
            let ok = a.adj[v].iter().all(|&u| {
                let m = map[u as usize];
                let mult = |l: &[u32; 3], t: u32| l.iter().filter(|&&w| w == t).count();
                m == u32::MAX || mult(&a.adj[v], u) == mult(&b.adj[c as usize], m)
            });
            if !ok {
                continue;
            }
            map[v] = c;
            used[c as usize] = true;
            if rec(a, b, order, k + 1, map, used, pins) {
                return true;
            }
            map[v] = u32::MAX;
            used[c as usize] = false;
        }
        false
    }
    rec(a, b, &order, 0, &mut map, &mut used, pins)
}

fn isomorphic(a: &Profiled, b: &Profiled) -> bool {
    if a.key != b.key {
        return false;
    }
    (0..b.adj.len() as u32).any(|t| iso_from(a, b, &[(0, t)]))
}

fn edges_of(adj: &Adj) -> Vec<(u32, u32)> {
    let mut e = Vec::new();
    for (v, nb) in adj.iter().enumerate() {
        let v = v as u32;
        for &u in nb {
            if v < u {
                e.push((v, u));
            }
        }
        let loops = nb.iter().filter(|&&u| u == v).count() / 2;
        e.extend(std::iter::repeat_n((v, v), loops));
    }
    e
}

/// Edge-transitivity by pinned isomorphism search, without any group machinery.
fn edge_transitive_brute(p: &Profiled) -> bool {
    let edges = edges_of(&p.adj);
    let (u0, v0) = edges[0];
    edges.iter().all(|&(a, b)| iso_from(p, p, &[(u0, a), (v0, b)]) || iso_from(p, p, &[(u0, b), (v0, a)]))
}

fn is_simple(adj: &Adj) -> bool {
    adj.iter().enumerate().all(|(v, l)| !l.contains(&(v as u32)) && l[0] != l[1] && l[1] != l[2] && l[0] != l[2])
}

/// Every connected cubic multigraph (loops allowed) on `n + 2` vertices from those on `n`:
/// subdivide two edges (possibly the same one twice) and join the new vertices, or
/// subdivide one edge and hang a new looped vertex off it.
fn insert_all(prev: &[Profiled]) -> Vec<Profiled> {
    let mut buckets: BTreeMap<Vec<Vec<u32>>, Vec<Profiled>> = BTreeMap::new();
    for g in prev {
        let n = g.adj.len() as u32;
        let edges = edges_of(&g.adj);
        for i in 0..edges.len() {
            for j in i..=edges.len() {
                let mut lists: Vec<Vec<u32>> = g.adj.iter().map(|a| a.to_vec()).collect();
                lists.push(vec![]);
                lists.push(vec![]);
                let (x, y) = (n, n + 1);
                let retarget = |lists: &mut Vec<Vec<u32>>, p: u32, q: u32, s: u32| {
                    let slot = lists[p as usize].iter().position(|&t| t == q).unwrap();
                    lists[p as usize][slot] = s;
                };
                if j == edges.len() {
                    let (a, b) = edges[i];
                    retarget(&mut lists, a, b, x);
                    retarget(&mut lists, b, a, x);
                    lists[x as usize].extend([a, b, y]);
                    lists[y as usize].extend([x, y, y]);
                } else if i == j {
                    let (a, b) = edges[i];
                    retarget(&mut lists, a, b, x);
                    retarget(&mut lists, b, a, y);
                    lists[x as usize].extend([a, y, y]);
                    lists[y as usize].extend([b, x, x]);
                } else {
                    for (e, s) in [(edges[i], x), (edges[j], y)] {
                        let (a, b) = e;
                        retarget(&mut lists, a, b, s);
                        retarget(&mut lists, b, a, s);
                        lists[s as usize].extend([a, b]);
                    }
                    lists[x as usize].push(y);
                    lists[y as usize].push(x);
                }
                let adj: Adj = lists.iter().map(|l| [l[0], l[1], l[2]]).collect();
                let p = profiled(adj);
                let bucket = buckets.entry(p.key.clone()).or_default();
                if !bucket.iter().any(|q| isomorphic(q, &p)) {
                    bucket.push(p);
                }
            }
        }
    }
    buckets.into_values().flatten().collect()
}

// ---------------------------------------------------------------------------
// reference sparse6 encoder, written straight from the format description

fn reference_sparse6(n: usize, edges: &[(u32, u32)]) -> String {
    let mut out = String::from(":");
    let mut bytes: Vec<u8> = Vec::new();
    if n <= 62 {
        bytes.push(n as u8);
    } else if n <= 258_047 {
        bytes.push(63);
        for sh in [12, 6, 0] {
            bytes.push(((n >> sh) & 63) as u8);
        }
    } else {
        bytes.extend([63, 63]);
        for sh in [30, 24, 18, 12, 6, 0] {
            bytes.push(((n >> sh) & 63) as u8);
        }
    }
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    let mut sorted: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (a.max(b), a.min(b))).collect();
    sorted.sort();
    let mut bits = String::new();
    let push = |bits: &mut String, x: usize, w: usize| {
        for i in (0..w).rev() {
            bits.push(if (x >> i) & 1 == 1 { '1' } else { '0' });
        }
    };
    let mut v = 0usize;
    for &(hi, lo) in &sorted {
        let (hi, lo) = (hi as usize, lo as usize);
        if hi == v {
            bits.push('0');
            push(&mut bits, lo, k);
        } else if hi == v + 1 {
            v = hi;
            bits.push('1');
            push(&mut bits, lo, k);
        } else {
            v = hi;
            bits.push('1');
            push(&mut bits, hi, k);
            bits.push('0');
            push(&mut bits, lo, k);
        }
    }
    let pad = (6 - bits.len() % 6) % 6;
    if k < 6 && n == (1 << k) && pad > k && v == n - 2 {
        bits.push('0');
        bits.extend(std::iter::repeat_n('1', pad - 1));
    } else {
        bits.extend(std::iter::repeat_n('1', pad));
    }
    for chunk in bits.as_bytes().chunks(6) {
        let x = chunk.iter().fold(0u8, |acc, &c| acc * 2 + (c - b'0'));
        bytes.push(x);
    }
    out.extend(bytes.into_iter().map(|b| (b + 63) as char));
    out
}

// ---------------------------------------------------------------------------
// harness

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn census(max_order: usize, types: &[&str], tweak: impl FnOnce(&mut CensusConfig)) -> Census {
    let mut cfg = CensusConfig { max_order, types: types.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    tweak(&mut cfg);
    run_census(&cfg).expect("census runs")
}

fn same_graph(a: &CubicGraph, b: &CubicGraph) -> bool {
    canonical_key(a) == canonical_key(b)
}

struct Runs {
    c16: Option<Census>,
    c120: Option<Census>,
    goldens: Vec<Census>,
}

fn criterion_1(runs: &mut Runs) -> Outcome {
    // theta and dumbbell, the connected cubic multigraphs on two vertices
    let mut level = vec![profiled(vec![[1, 1, 1], [0, 0, 0]]), profiled(vec![[0, 0, 1], [1, 1, 0]])];
    let mut oracle: BTreeMap<usize, Vec<Profiled>> = BTreeMap::new();
    let mut counts = Vec::new();
    for n in (4..=ORACLE_MAX_N).step_by(2) {
        level = insert_all(&level);
        let simple: Vec<&Profiled> = level.iter().filter(|p| is_simple(&p.adj)).collect();
        counts.push(simple.len());
        oracle.insert(n, simple.into_iter().filter(|p| edge_transitive_brute(p)).map(|p| profiled(p.adj.clone())).collect());
    }
    if counts != CUBIC_COUNTS {
        return fail(format!("generator counts {counts:?}"));
    }
    let c = census(ORACLE_MAX_N, &[], |_| {});
    let mut mismatches = Vec::new();
    let mut total = 0;
    for (&n, ets) in &oracle {
        let found: Vec<Profiled> = c.records.iter().filter(|r| r.n == n).map(|r| profiled(adj_of(&r.graph))).collect();
        total += ets.len();
        let matched = found.len() == ets.len() && ets.iter().all(|o| found.iter().filter(|f| isomorphic(o, f)).count() == 1);
        if !matched {
            mismatches.push(n);
        }
    }
    runs.c16 = Some(c);
    if mismatches.is_empty() {
        pass(format!("{total} edge-transitive graphs among {} connected cubic graphs; every order matches", counts.iter().sum::<usize>()))
    } else {
        fail(format!("orders {mismatches:?} differ"))
    }
}

fn smallest(c: &Census, class: &str) -> Option<CensusRecord> {
    c.records.iter().filter(|r| r.class == class).min_by_key(|r| r.n).cloned()
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    struct Golden {
        class: &'static str,
        n: usize,
        aut: u64,
        graph: Option<CubicGraph>,
        smallest: bool,
    }
    let goldens = [
        Golden { class: "DjM2^1", n: 4, aut: 24, graph: Some(named::k4()), smallest: true },
        Golden { class: "DjM3", n: 6, aut: 72, graph: Some(named::k33()), smallest: true },
        Golden { class: "DjM3", n: 10, aut: 120, graph: Some(named::petersen()), smallest: false },
        Golden { class: "DjM4^1", n: 14, aut: 336, graph: Some(named::heawood()), smallest: true },
        Golden { class: "DjM1", n: 26, aut: 78, graph: Some(named::f026()), smallest: true },
        Golden { class: "DjM5", n: 30, aut: 1440, graph: Some(named::tutte_8_cage()), smallest: true },
        Golden { class: "G2^4", n: 54, aut: 1296, graph: Some(named::gray()), smallest: true },
        Golden { class: "G2^1", n: 110, aut: 1320, graph: None, smallest: true },
        Golden { class: "G1", n: 112, aut: 168, graph: None, smallest: true },
        Golden { class: "G1^3", n: 120, aut: 720, graph: None, smallest: true },
        Golden { class: "G1^1", n: 144, aut: 432, graph: None, smallest: true },
    ];
    let mut bad = Vec::new();
    for g in &goldens {
        let c = census(g.n, &[g.class], |_| {});
        let rec = if g.smallest {
            smallest(&c, g.class)
        } else {
            c.records.iter().find(|r| r.class == g.class && r.n == g.n).cloned()
        };
        let ok = rec.as_ref().is_some_and(|r| {
            r.n == g.n && r.aut_order == BigUint::from(g.aut) && g.graph.as_ref().is_none_or(|h| same_graph(&r.graph, h))
        }) && c.sweeps[0].complete(g.n);
        if !ok {
            bad.push(format!("{}@{}", g.class, g.n));
        }
        runs.goldens.push(c);
    }
    // G1^2: the sweep certifies small orders, cover lifting reaches 294
    let c = census(294, &["G1^2"], |cfg| {
        cfg.caps.insert("G1^2".into(), G12_CAP);
        cfg.lift = Some(LiftConfig { max_codim: 2, budget: 100_000 });
    });
    let certified = c.sweeps[0].certified_order;
    let rec = smallest(&c, "G1^2");
    if !rec.as_ref().is_some_and(|r| r.n == 294 && r.aut_order == BigUint::from(882u32)) {
        bad.push("G1^2@294".into());
    }
    runs.goldens.push(c);
    if bad.is_empty() {
        pass(format!(
            "{} goldens exact; G1^2 found at 294 with |Aut| 882, sweep certifies none of order <= {}, orders above that up to 292 uncertified",
            goldens.len() + 1,
            certified
        ))
    } else {
        fail(format!("mismatched {bad:?}"))
    }
}

fn criterion_3() -> Outcome {
    let wanted: Vec<BigUint> = {
        let fact = |k: u32| (1..=k).fold(BigUint::from(1u32), |a, b| a * b);
        vec![BigUint::from(168u32), BigUint::from(336u32), BigUint::from(56448u32), fact(32) / 2u32, fact(64) / 2u32, fact(16) / 2u32]
    };
    let mut cores = BTreeSet::new();
    let mut failed = Vec::new();
    for rec in catalog().ledger() {
        match verify_inclusion(rec) {
            Ok(rep) if rep.passed() => {
                if let Some(c) = rep.core_order {
                    cores.insert(c);
                }
            }
            _ => failed.push(format!("{}<={}", rec.sub, rec.sup)),
        }
    }
    let missing: Vec<String> = wanted.iter().filter(|w| !cores.contains(w)).map(|w| w.to_string()).collect();
    if failed.is_empty() && missing.is_empty() {
        pass(format!("{} records pass, big core orders present", catalog().ledger().len()))
    } else {
        fail(format!("failed {failed:?}, missing cores {missing:?}"))
    }
}

fn criterion_4() -> Outcome {
    let hosts = [named::k4(), named::k33(), named::heawood(), named::gray(), named::tutte_8_cage(), named::tutte_12_cage()];
    let mut seen: BTreeMap<String, (LocalS, LocalS)> = BTreeMap::new();
    for g in &hosts {
        let aut = automorphism_group(g);
        let (subs, _) = edge_transitive_subgroups(g, &aut, ACTION_TYPE_BUDGET).expect("edge-transitive host");
        for (class, h) in subs {
            if seen.contains_key(&class) {
                continue;
            }
            let t = classify_group(g, &h).expect("typed subgroup");
            let want = catalog().get(&class).unwrap().local_s;
            seen.insert(class, (t.local_s, want));
        }
    }
    let wrong: Vec<String> = seen.iter().filter(|(_, (a, b))| a != b).map(|(c, (a, b))| format!("{c}: got {a} want {b}")).collect();
    let missing: Vec<&str> = catalog().specs().iter().map(|s| s.id.as_str()).filter(|id| !seen.contains_key(*id)).collect();
    let g24 = seen.get("G2^4").map(|x| x.0) == Some(LocalS::Pair(3, 4));
    let g41 = seen.get("G4^1").map(|x| x.0) == Some(LocalS::Pair(7, 7));
    if wrong.is_empty() && g24 && g41 {
        pass(format!("{} classes realised and matching, incl. G2^4 (3,4) and G4^1 (7,7); not realised at desk scale: {}", seen.len(), missing.join(",")))
    } else {
        fail(format!("{wrong:?} g24={g24} g41={g41}"))
    }
}

fn all_records(runs: &Runs) -> Vec<&CensusRecord> {
    runs.c16.iter().chain(&runs.c120).chain(&runs.goldens).flat_map(|c| &c.records).collect()
}

fn criterion_5(runs: &Runs) -> Outcome {
    let recs = all_records(runs);
    let mut bad = Vec::new();
    for r in &recs {
        let v = r.vertex_stab_order;
        let k = (v / 3).trailing_zeros();
        let s = k + 1;
        let shape = v % 3 == 0 && (v / 3).is_power_of_two();
        let at_ok = match r.kind {
            CensusKind::Cat => s <= MAX_S_ARC_TRANSITIVE,
            CensusKind::Css => true,
        };
        if r.edge_stab_order > MAX_EDGE_STAB || !shape || s > MAX_S || !at_ok {
            bad.push(r.name());
        }
    }
    if bad.is_empty() {
        pass(format!("{} emitted records, zero violations", recs.len()))
    } else {
        fail(format!("violations {bad:?}"))
    }
}

fn criterion_6(runs: &Runs) -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5e6);
    let mut corpus: Vec<CubicGraph> = (0..RANDOM_S6_GRAPHS)
        .map(|_| {
            let n = 2 * rng.gen_range(2..=150);
            random_cubic(n, &mut rng)
        })
        .collect();
    corpus.extend(all_records(runs).into_iter().map(|r| r.graph.clone()));
    let mut bad = 0;
    for g in &corpus {
        let s = g.sparse6();
        let reference = reference_sparse6(g.n(), &g.edges());
        let norm = |e: &[(u32, u32)]| {
            let mut e: Vec<(u32, u32)> = e.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            e.sort_unstable();
            e
        };
        let want = norm(&g.edges());
        let round = sparse6_decode(&s).is_ok_and(|(n, e)| n == g.n() && norm(&e) == want);
        let rebuilt = CubicGraph::from_sparse6(&s).is_ok_and(|h| norm(&h.edges()) == want);
        if s != reference || !round || !rebuilt {
            bad += 1;
        }
    }
    if bad == 0 {
        pass(format!("{} graphs round-trip and match the reference encoder byte for byte", corpus.len()))
    } else {
        fail(format!("{bad} of {} graphs differ", corpus.len()))
    }
}

fn criterion_7() -> Outcome {
    let mut covers = 0;
    let mut full = 0;
    let mut bad = Vec::new();
    for (name, g) in [("K3,3", named::k33()), ("Petersen", named::petersen())] {
        let aut = automorphism_group(&g);
        let (subs, _) = edge_transitive_subgroups(&g, &aut, ACTION_TYPE_BUDGET).unwrap();
        for p in [5u32, 7] {
            for (class, h) in &subs {
                let (basis, mats) = homology_action(&g, h, p).unwrap();
                let want_beta = if g.n() == 6 { 4 } else { 6 };
                if basis.beta() != want_beta {
                    bad.push(format!("{name} beta"));
                }
                for w in invariant_subspaces(&mats, basis.beta(), p, 1, 100_000).unwrap() {
                    let spec = CoverSpec::from_subspace(&g, h, p, &w).unwrap();
                    let (c, cert) = derived_cover(&spec).unwrap();
                    covers += 1;
                    let ok = c.n() == g.n() * p as usize && cert.ct_order == BigUint::from(p) && verify_certificate(&spec, &c, &cert);
                    if !ok {
                        bad.push(format!("{name} p={p} {class}"));
                    }
                    if automorphism_group(&c).order() == h.order() * BigUint::from(p) {
                        full += 1;
                        if classify(&c).map(|t| t.class).as_deref() != Ok(class.as_str()) {
                            bad.push(format!("{name} p={p} {class} type changed"));
                        }
                    }
                }
            }
        }
    }
    let cage = named::tutte_8_cage();
    let aut = automorphism_group(&cage);
    let (basis, mats) = homology_action(&cage, &aut, 3).unwrap();
    let subs = invariant_subspaces(&mats, basis.beta(), 3, 1, 100_000).unwrap();
    let f090 = subs.first().map(|w| {
        let spec = CoverSpec::from_subspace(&cage, &aut, 3, w).unwrap();
        derived_cover(&spec).unwrap().0
    });
    let f090_ok = f090.as_ref().is_some_and(|c| {
        c.n() == 90 && classify(c).is_ok_and(|t| t.kind == Kind::ArcTransitive) && same_graph(c, &named::f090())
    });
    if bad.is_empty() && f090_ok {
        pass(format!("{covers} covers of K3,3/Petersen certified ({full} with full lift, types preserved); 8-cage triple cover is the 90-vertex arc-transitive graph"))
    } else {
        fail(format!("{bad:?} f090={f090_ok}"))
    }
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let c = census(HAMILTON_MAX_N, &[], |cfg| cfg.hamilton_budget = HAMILTON_BUDGET);
    let exceptions = [named::petersen(), named::coxeter()];
    let mut bad = Vec::new();
    let mut cycles = 0;
    for r in &c.records {
        let exceptional = exceptions.iter().any(|e| same_graph(e, &r.graph));
        match hamilton_cycle(&r.graph, HAMILTON_BUDGET) {
            Hamilton::Cycle(cy) if !exceptional && is_hamilton_cycle(&r.graph, &cy) => cycles += 1,
            Hamilton::ProvenNone if exceptional => {}
            _ => bad.push(r.name()),
        }
    }
    let complete = c.certified_order(Kind::ArcTransitive) >= HAMILTON_MAX_N && c.certified_order(Kind::Semisymmetric) >= HAMILTON_MAX_N;
    runs.c120 = Some(c);
    if bad.is_empty() && complete {
        pass(format!("{cycles} certified cycles; Petersen and Coxeter proven non-hamiltonian"))
    } else {
        fail(format!("failures {bad:?}, complete={complete}"))
    }
}

fn criterion_9(runs: &Runs) -> Outcome {
    let c = runs.c120.as_ref().expect("order-120 census");
    let st = Stats::from_rows(c.max_order, c.records.iter().map(|r| (r.kind, r.n, r.class.clone())).collect());
    let growth: Vec<Vec<usize>> = st.growth_csv().lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    let monotone = growth.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
    let consistent = growth.iter().all(|row| row[1] == row[2] + row[3] && row[1] == row[4..].iter().sum::<usize>());
    let last_total = growth.last().map(|r| r[1]);
    let orders: BTreeSet<usize> = c.records.iter().map(|r| r.n).collect();
    let mut density_ok = true;
    let mut prev = 0.0f64;
    for n in (2..=c.max_order).step_by(2) {
        let d = st.density(None, n);
        let new_order = orders.contains(&n);
        if !new_order && n > 2 && d > prev + 1e-12 {
            density_ok = false;
        }
        prev = d;
    }
    let ok = monotone && consistent && density_ok && last_total == Some(c.records.len());
    let note = "order-10000 totals, per-type counts at 10000, the order-5314410 DjM4^2 graph, the smallest G2^2 graph and asymptotic growth are out of desk scale";
    if ok {
        pass(format!("{note}; emitted growth/density series are monotone and consistent"))
    } else {
        fail(format!("monotone={monotone} consistent={consistent} density={density_ok}"))
    }
}

fn main() {
    let mut runs = Runs { c16: None, c120: None, goldens: Vec::new() };
    let mut results = Vec::new();
    // ACCEPT_ONLY=1,6 restricts the run to the listed criteria
    let only: Option<Vec<usize>> = std::env::var("ACCEPT_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut run = |id: usize, name: &str, f: &mut dyn FnMut(&mut Runs) -> Outcome, runs: &mut Runs| {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            return;
        }
        let t = Instant::now();
        let o = f(runs);
        println!("{} [{}] {}: {} ({:.1?})", if o.ok { "PASS" } else { "FAIL" }, id, name, o.detail, t.elapsed());
        results.push(o.ok);
    };
    run(1, "oracle census equivalence n<=16", &mut criterion_1, &mut runs);
    run(2, "golden smallest examples", &mut criterion_2, &mut runs);
    run(3, "inclusion ledger", &mut |_| criterion_3(), &mut runs);
    run(4, "local s-arc transitivity table", &mut |_| criterion_4(), &mut runs);
    run(8, "hamiltonicity n<=120", &mut criterion_8, &mut runs);
    run(5, "stabiliser bounds", &mut |r| criterion_5(r), &mut runs);
    run(6, "sparse6 bit-exactness", &mut |r| criterion_6(r), &mut runs);
    run(7, "covers", &mut |_| criterion_7(), &mut runs);
    run(9, "desk-scale limits and statistics", &mut |r| criterion_9(r), &mut runs);
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {} failed", results.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
