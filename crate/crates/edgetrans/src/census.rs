//! The census pipeline: per-type normal-subgroup sweeps, coset graphs, the full-Aut
//! gate, classification, canonical deduplication, optional cover lifting, and the
//! on-disk census layout with its summary statistics.

use crate::catalog::{catalog, AmalgamSpec, CatalogError, Kind};
use crate::classifier::{classify_group, edge_transitive_subgroups, ActionType, ClassifyError};
use crate::covers::{derived_cover, homology_action, invariant_subspaces, is_prime, CoverError, CoverSpec};
use crate::graph::{coset_graph, hamilton_cycle, CubicGraph, GraphError};
use crate::graph_aut::canonical_form;
use crate::normal_search::{search, SearchConfig, SearchError};
use crate::permgroup::PermGroup;
use num_bigint::BigUint;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(thiserror::Error, Debug)]
pub enum CensusError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corrupt census directory: {0}")]
    Corrupt(String),
}

/// Elementary-abelian cover lifting applied to every graph the sweeps find.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftConfig {
    pub max_codim: usize,
    /// Bound on enumerated subspaces (and on `p^β` for codimension above 1).
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusConfig {
    pub max_order: usize,
    /// Classes to sweep, catalog ids; all classes when empty.
    pub types: Vec<String>,
    /// Index caps overriding [`default_cap`].
    pub caps: BTreeMap<String, usize>,
    pub node_budget: Option<u64>,
    pub jobs: usize,
    pub out_dir: Option<PathBuf>,
    pub lift: Option<LiftConfig>,
    pub hamilton_budget: u64,
    pub action_type_budget: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            max_order: 30,
            types: Vec::new(),
            caps: BTreeMap::new(),
            node_budget: None,
            jobs: 1,
            out_dir: None,
            lift: None,
            hamilton_budget: 2_000_000,
            action_type_budget: crate::classifier::ACTION_TYPE_BUDGET,
        }
    }
}

impl CensusConfig {
    /// Applies `key=value` lines; blank lines and `#` comments are ignored.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), CensusError> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CensusError::Config(format!("line {}: expected key=value", no + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CensusError> {
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, CensusError> {
            v.parse().map_err(|_| CensusError::Config(format!("{k}: bad number `{v}`")))
        }
        match key {
            "max_order" => self.max_order = num(key, value)?,
            "types" => {
                self.types = value.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(String::from).collect();
                for t in &self.types {
                    catalog().get(t)?;
                }
            }
            "node_budget" => self.node_budget = Some(num(key, value)?),
            "jobs" => self.jobs = num(key, value)?,
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "lift" => match value {
                "off" | "false" | "0" => self.lift = None,
                "on" | "true" | "1" => self.lift = Some(self.lift.clone().unwrap_or(LiftConfig { max_codim: 2, budget: 100_000 })),
                _ => return Err(CensusError::Config(format!("lift: expected on/off, got `{value}`"))),
            },
            "lift_codim" => self.lift.get_or_insert(LiftConfig { max_codim: 2, budget: 100_000 }).max_codim = num(key, value)?,
            "lift_budget" => self.lift.get_or_insert(LiftConfig { max_codim: 2, budget: 100_000 }).budget = num(key, value)?,
            "hamilton_budget" => self.hamilton_budget = num(key, value)?,
            "action_type_budget" => self.action_type_budget = num(key, value)?,
            _ => match key.strip_prefix("cap.") {
                Some(id) => {
                    let id = catalog().get(id)?.id.clone();
                    self.caps.insert(id, num(key, value)?);
                }
                None => return Err(CensusError::Config(format!("unknown key `{key}`"))),
            },
        }
        Ok(())
    }

    fn specs(&self) -> Result<Vec<&'static AmalgamSpec>, CensusError> {
        if self.types.is_empty() {
            Ok(catalog().specs().iter().collect())
        } else {
            self.types.iter().map(|t| Ok(catalog().get(t)?)).collect()
        }
    }
}

/// Quotient order bound covering every graph of the class with at most `max_order` vertices.
pub fn default_cap(spec: &AmalgamSpec, max_order: usize) -> usize {
    match spec.kind {
        Kind::ArcTransitive => max_order * spec.stab.0,
        Kind::Semisymmetric => max_order * spec.stab.0 / 2,
    }
}

/// Largest graph order whose quotients are all below `index`.
fn order_bound(spec: &AmalgamSpec, index: usize) -> usize {
    match spec.kind {
        Kind::ArcTransitive => index / spec.stab.0,
        Kind::Semisymmetric => 2 * index / spec.stab.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CensusKind {
    Cat,
    Css,
}

impl CensusKind {
    pub fn label(self) -> &'static str {
        match self {
            CensusKind::Cat => "CAT",
            CensusKind::Css => "CSS",
        }
    }

    fn of(k: Kind) -> CensusKind {
        match k {
            Kind::ArcTransitive => CensusKind::Cat,
            Kind::Semisymmetric => CensusKind::Css,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusRecord {
    pub kind: CensusKind,
    pub n: usize,
    /// 1-based row within `CAT_n.s6` or `CSS_n.s6`.
    pub k: usize,
    pub class: String,
    pub action_type: ActionType,
    pub aut_order: BigUint,
    pub edge_stab_order: usize,
    pub vertex_stab_order: usize,
    pub girth: u32,
    pub diameter: Option<u32>,
    pub bipartite: bool,
    pub hamiltonian: &'static str,
    /// Canonically labelled graph.
    pub graph: CubicGraph,
    pub s6: String,
    /// True when only the cover-lifting stage produced this graph.
    pub lifted_only: bool,
    key: Vec<u8>,
}

impl CensusRecord {
    /// `CAT(n,k)` / `CSS(n,k)`.
    pub fn name(&self) -> String {
        format!("{}({},{})", self.kind.label(), self.n, self.k)
    }
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub class: String,
    pub kind: Kind,
    pub cap: usize,
    pub swept_to: usize,
    pub certified_order: usize,
    pub quotients: usize,
    pub nodes: u64,
    /// Quotients whose coset graph has more automorphisms than the quotient.
    pub gate_rejections: usize,
}

impl SweepReport {
    pub fn complete(&self, max_order: usize) -> bool {
        self.certified_order >= max_order
    }
}

#[derive(Clone, Debug)]
pub struct Census {
    pub max_order: usize,
    /// Sorted by kind, order and canonical key.
    pub records: Vec<CensusRecord>,
    pub sweeps: Vec<SweepReport>,
    pub lift: Option<LiftConfig>,
    /// Lift attempts skipped because a subspace search exceeded its budget.
    pub lift_skipped: usize,
}

struct Found {
    graph: CubicGraph,
    key: Vec<u8>,
    relabeling: Vec<u32>,
    aut: PermGroup,
    lifted_only: bool,
}

fn canon(g: CubicGraph, lifted_only: bool) -> Found {
    let cf = canonical_form(&g);
    let aut = cf.group(g.n());
    Found { graph: g, key: cf.key, relabeling: cf.relabeling, aut, lifted_only }
}

/// Runs every sweep, processes the graphs and (optionally) lifts them along covers.
pub fn run_census(cfg: &CensusConfig) -> Result<Census, CensusError> {
    let specs = cfg.specs()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build().expect("thread pool");
    let mut sweeps = Vec::new();
    let mut found: BTreeMap<Vec<u8>, Found> = BTreeMap::new();
    for spec in specs {
        let cap = cfg.caps.get(&spec.id).copied().unwrap_or_else(|| default_cap(spec, cfg.max_order));
        let seed = spec.faithful_seed()?;
        let floor = seed.rows.len();
        let out = if cap < floor {
            None
        } else {
            Some(search(&spec.presentation, &SearchConfig { max_index: cap, node_budget: cfg.node_budget, jobs: cfg.jobs, seed: Some(seed) })?)
        };
        let (records, swept_to, nodes) = match out {
            Some(o) => (o.records, o.swept_to, o.nodes),
            None => (vec![], cap, 0),
        };
        let graphs: Vec<Option<Result<Found, GraphError>>> = pool.install(|| {
            records
                .par_iter()
                .map(|r| {
                    let g = match coset_graph(r, spec) {
                        Ok(g) => g,
                        Err(e) => return Some(Err(e)),
                    };
                    (g.n() <= cfg.max_order).then(|| Ok(canon(g, false)))
                })
                .collect()
        });
        let mut gate_rejections = 0;
        for (r, f) in records.iter().zip(graphs) {
            let Some(Ok(f)) = f else { continue };
            if f.aut.order() != BigUint::from(r.index) {
                gate_rejections += 1;
            }
            found.entry(f.key.clone()).or_insert(f);
        }
        sweeps.push(SweepReport {
            class: spec.id.clone(),
            kind: spec.kind,
            cap,
            swept_to,
            certified_order: order_bound(spec, swept_to).min(cfg.max_order),
            quotients: records.len(),
            nodes,
            gate_rejections,
        });
    }
    let mut lift_skipped = 0;
    let mut subgroups: BTreeMap<Vec<u8>, (Vec<(String, PermGroup)>, bool)> = BTreeMap::new();
    let mut queue: Vec<Vec<u8>> = found.keys().cloned().collect();
    queue.sort_by_key(|k| (found[k].graph.n(), k.clone()));
    let mut qi = 0;
    while qi < queue.len() {
        let key = queue[qi].clone();
        qi += 1;
        let f = &found[&key];
        let subs = edge_transitive_subgroups(&f.graph, &f.aut, cfg.action_type_budget)
            .unwrap_or_else(|_| (vec![], false));
        if let Some(lift) = &cfg.lift {
            let (covers, skipped) = lift_covers(&f.graph, &subs.0, cfg.max_order, lift, &pool);
            lift_skipped += skipped;
            for c in covers {
                let cf = canon(c, true);
                if !found.contains_key(&cf.key) {
                    queue.push(cf.key.clone());
                    found.insert(cf.key.clone(), cf);
                }
            }
        }
        subgroups.insert(key, subs);
    }
    let items: Vec<(&Vec<u8>, &Found)> = found.iter().collect();
    let mut records: Vec<CensusRecord> = pool.install(|| {
        items
            .par_iter()
            .filter_map(|(key, f)| make_record(f, key, &subgroups[*key], cfg.hamilton_budget).ok())
            .collect()
    });
    records.sort_by(|a, b| (a.kind, a.n, &a.key).cmp(&(b.kind, b.n, &b.key)));
    let mut last = (CensusKind::Cat, 0usize, 0usize);
    for r in &mut records {
        last = if (last.0, last.1) == (r.kind, r.n) { (r.kind, r.n, last.2 + 1) } else { (r.kind, r.n, 1) };
        r.k = last.2;
    }
    Ok(Census { max_order: cfg.max_order, records, sweeps, lift: cfg.lift.clone(), lift_skipped })
}

fn make_record(f: &Found, key: &[u8], subs: &(Vec<(String, PermGroup)>, bool), ham_budget: u64) -> Result<CensusRecord, ClassifyError> {
    let t = classify_group(&f.graph, &f.aut)?;
    let g = f.graph.relabel(&f.relabeling);
    let inv = g.invariants();
    let classes = subs.0.iter().map(|(c, _)| c.clone()).collect();
    Ok(CensusRecord {
        kind: CensusKind::of(t.kind),
        n: g.n(),
        k: 0,
        class: t.class,
        action_type: ActionType::from_classes(t.kind, classes, subs.1),
        aut_order: t.group_order,
        edge_stab_order: t.edge_stab_order,
        vertex_stab_order: t.vertex_stab_order,
        girth: inv.girth,
        diameter: inv.diameter,
        bipartite: inv.bipartite,
        hamiltonian: hamilton_cycle(&g, ham_budget).label(),
        s6: g.sparse6(),
        graph: g,
        lifted_only: f.lifted_only,
        key: key.to_vec(),
    })
}

fn primes_up_to(n: usize) -> Vec<u32> {
    (2..=n as u32).filter(|&p| is_prime(p)).collect()
}

/// Covers of `g` with covering group `F_p^d` along each edge-transitive subgroup.
fn lift_covers(
    g: &CubicGraph,
    subs: &[(String, PermGroup)],
    max_order: usize,
    lift: &LiftConfig,
    pool: &rayon::ThreadPool,
) -> (Vec<CubicGraph>, usize) {
    let n = g.n();
    let mut jobs = Vec::new();
    for p in primes_up_to(max_order / n) {
        let mut size = n;
        for d in 1..=lift.max_codim {
            size *= p as usize;
            if size > max_order {
                break;
            }
            for (_, h) in subs {
                jobs.push((p, d, h));
            }
        }
    }
    let results: Vec<Result<Vec<CubicGraph>, CoverError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, d, h)| {
                let (basis, mats) = homology_action(g, h, p)?;
                let subspaces = invariant_subspaces(&mats, basis.beta(), p, d, lift.budget)?;
                subspaces
                    .iter()
                    .map(|w| Ok(derived_cover(&CoverSpec::from_subspace(g, h, p, w)?)?.0))
                    .collect()
            })
            .collect()
    });
    let mut out = Vec::new();
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(v) => out.extend(v),
            Err(_) => skipped += 1,
        }
    }
    (out, skipped)
}

impl Census {
    pub fn of_kind(&self, kind: CensusKind) -> impl Iterator<Item = &CensusRecord> {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    /// Largest order up to which every sweep of `kind` certified completeness.
    pub fn certified_order(&self, kind: Kind) -> usize {
        self.sweeps.iter().filter(|s| s.kind == kind).map(|s| s.certified_order).min().unwrap_or(0)
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("kind,n,k,type,action_type,aut_order,girth,diameter,bipartite,hamiltonian\n");
        for r in &self.records {
            let mut at = r.action_type.own_kind().join(";");
            if !r.action_type.complete {
                at.push_str(";?");
            }
            let diam = r.diameter.map_or("inf".to_string(), |d| d.to_string());
            writeln!(s, "{},{},{},{},{},{},{},{},{},{}", r.kind.label(), r.n, r.k, r.class, at, r.aut_order, r.girth, diam, r.bipartite, r.hamiltonian).unwrap();
        }
        s
    }

    pub fn manifest(&self) -> String {
        let mut s = String::new();
        writeln!(s, "max_order={}", self.max_order).unwrap();
        for sw in &self.sweeps {
            let status = if sw.complete(self.max_order) { "complete".to_string() } else { format!("incomplete above order {}", sw.certified_order) };
            writeln!(
                s,
                "sweep {} kind={} cap={} swept_to={} certified_order={} quotients={} gate_rejections={} nodes={} {}",
                sw.class,
                CensusKind::of(sw.kind).label(),
                sw.cap,
                sw.swept_to,
                sw.certified_order,
                sw.quotients,
                sw.gate_rejections,
                sw.nodes,
                status
            )
            .unwrap();
        }
        for k in [Kind::ArcTransitive, Kind::Semisymmetric] {
            writeln!(s, "certified_complete {}={}", CensusKind::of(k).label(), self.certified_order(k)).unwrap();
        }
        match &self.lift {
            Some(l) => {
                writeln!(s, "lift max_codim={} budget={} skipped={}", l.max_codim, l.budget, self.lift_skipped).unwrap();
                for r in self.records.iter().filter(|r| r.lifted_only) {
                    writeln!(s, "lift_only {} type={}", r.name(), r.class).unwrap();
                }
            }
            None => writeln!(s, "lift off").unwrap(),
        }
        for kind in [CensusKind::Cat, CensusKind::Css] {
            writeln!(s, "graphs {}={}", kind.label(), self.of_kind(kind).count()).unwrap();
        }
        s
    }

    /// Writes the `.s6` files, `summary.csv`, `manifest.txt` and the statistics.
    pub fn write(&self, dir: &Path) -> Result<(), CensusError> {
        fs::create_dir_all(dir)?;
        for entry in fs::read_dir(dir)? {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if (name.starts_with("CAT_") || name.starts_with("CSS_")) && name.ends_with(".s6") {
                fs::remove_file(dir.join(name))?;
            }
        }
        let mut files: BTreeMap<String, String> = BTreeMap::new();
        for r in &self.records {
            let f = files.entry(format!("{}_{}.s6", r.kind.label(), r.n)).or_default();
            f.push_str(&r.s6);
            f.push('\n');
        }
        for (name, body) in files {
            fs::write(dir.join(name), body)?;
        }
        fs::write(dir.join("summary.csv"), self.summary_csv())?;
        fs::write(dir.join("manifest.txt"), self.manifest())?;
        let st = Stats::from_rows(self.max_order, self.records.iter().map(|r| (r.kind, r.n, r.class.clone())).collect());
        fs::write(dir.join("growth.csv"), st.growth_csv())?;
        fs::write(dir.join("density.csv"), st.density_csv())?;
        Ok(())
    }
}

/// Cumulative counts per class and order densities.
#[derive(Clone, Debug, PartialEq)]
pub struct Stats {
    pub max_order: usize,
    pub rows: Vec<(CensusKind, usize, String)>,
}

impl Stats {
    pub fn from_rows(max_order: usize, rows: Vec<(CensusKind, usize, String)>) -> Stats {
        Stats { max_order, rows }
    }

    /// Reads `manifest.txt` and `summary.csv` from a census directory.
    pub fn load(dir: &Path) -> Result<Stats, CensusError> {
        let corrupt = |m: &str| CensusError::Corrupt(m.to_string());
        let manifest = fs::read_to_string(dir.join("manifest.txt"))?;
        let max_order = manifest
            .lines()
            .find_map(|l| l.strip_prefix("max_order="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| corrupt("manifest lacks max_order"))?;
        let summary = fs::read_to_string(dir.join("summary.csv"))?;
        let mut lines = summary.lines();
        if lines.next() != Some("kind,n,k,type,action_type,aut_order,girth,diameter,bipartite,hamiltonian") {
            return Err(corrupt("summary.csv header"));
        }
        let mut rows = Vec::new();
        for l in lines {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 10 {
                return Err(corrupt("summary.csv row width"));
            }
            let kind = match f[0] {
                "CAT" => CensusKind::Cat,
                "CSS" => CensusKind::Css,
                _ => return Err(corrupt("summary.csv kind")),
            };
            let n: usize = f[1].parse().map_err(|_| corrupt("summary.csv order"))?;
            rows.push((kind, n, f[3].to_string()));
        }
        Ok(Stats { max_order, rows })
    }

    /// Number of graphs of order at most `n` with the given class.
    pub fn f(&self, class: &str, n: usize) -> usize {
        self.rows.iter().filter(|(_, m, c)| c == class && *m <= n).count()
    }

    fn orders(&self) -> Vec<usize> {
        (1..=self.max_order / 2).map(|h| 2 * h).collect()
    }

    /// `n,total,CAT,CSS,<class>...`, one row per even order, cumulative.
    pub fn growth_csv(&self) -> String {
        let ids: Vec<&str> = catalog().specs().iter().map(|s| s.id.as_str()).collect();
        let mut s = format!("n,total,CAT,CSS,{}\n", ids.join(","));
        for n in self.orders() {
            let count = |k: Option<CensusKind>| self.rows.iter().filter(|(kk, m, _)| *m <= n && k.is_none_or(|k| k == *kk)).count();
            let per: Vec<String> = ids.iter().map(|c| self.f(c, n).to_string()).collect();
            writeln!(s, "{},{},{},{},{}", n, count(None), count(Some(CensusKind::Cat)), count(Some(CensusKind::Css)), per.join(",")).unwrap();
        }
        s
    }

    /// Fraction of integers up to `n` that occur as an order.
    pub fn density(&self, kind: Option<CensusKind>, n: usize) -> f64 {
        let orders: BTreeSet<usize> = self.rows.iter().filter(|(k, m, _)| *m <= n && kind.is_none_or(|kk| kk == *k)).map(|r| r.1).collect();
        orders.len() as f64 / n as f64
    }

    pub fn density_csv(&self) -> String {
        let mut s = String::from("n,all,CAT,CSS\n");
        for n in self.orders() {
            writeln!(
                s,
                "{},{:.6},{:.6},{:.6}",
                n,
                self.density(None, n),
                self.density(Some(CensusKind::Cat), n),
                self.density(Some(CensusKind::Css), n)
            )
            .unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let mut c = CensusConfig::default();
        c.apply_kv("# comment\nmax_order = 54\ntypes=G2^4, DjM3\ncap.G2^4=1296\nlift=on\nlift_codim=1\n").unwrap();
        assert_eq!(c.max_order, 54);
        assert_eq!(c.types, vec!["G2^4", "DjM3"]);
        assert_eq!(c.caps["G2^4"], 1296);
        assert_eq!(c.lift, Some(LiftConfig { max_codim: 1, budget: 100_000 }));
        assert!(c.apply_kv("bogus=1").is_err());
        assert!(c.apply_kv("types=G9").is_err());
        assert!(c.apply_kv("max_order").is_err());
    }

    #[test]
    fn caps_follow_stabilisers() {
        assert_eq!(default_cap(catalog().get("DjM5").unwrap(), 30), 30 * 48);
        assert_eq!(default_cap(catalog().get("G2^4").unwrap(), 54), 1296);
        assert_eq!(order_bound(catalog().get("G2^4").unwrap(), 1296), 54);
    }

    #[test]
    fn small_arc_transitive_census() {
        let cfg = CensusConfig { max_order: 16, ..Default::default() };
        let c = run_census(&cfg).unwrap();
        let orders: Vec<usize> = c.of_kind(CensusKind::Cat).map(|r| r.n).collect();
        assert_eq!(orders, vec![4, 6, 8, 10, 14, 16]);
        assert_eq!(c.of_kind(CensusKind::Css).count(), 0);
        assert_eq!(c.certified_order(Kind::ArcTransitive), 16);
    }

    #[test]
    fn empty_stats_are_zero() {
        let st = Stats::from_rows(10, vec![]);
        assert!(st.growth_csv().lines().skip(1).all(|l| l.split(',').skip(1).all(|x| x == "0")));
        assert_eq!(st.density(None, 10), 0.0);
    }
}
