use clap::{Parser, Subcommand};
use edgetrans::catalog::{catalog, verify_inclusion};
use edgetrans::census::{run_census, CensusConfig, Stats};
use edgetrans::classifier::{action_type_in, classify_group, edge_transitive_subgroups, ACTION_TYPE_BUDGET};
use edgetrans::covers::{derived_cover, homology_action, invariant_subspaces, make_strong_realization, verify_certificate, CoverSpec};
use edgetrans::graph::{hamilton_cycle, sparse6_decode, sparse6_encode, CubicGraph};
use edgetrans::graph_aut::{automorphism_group, symmetry_with};
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "edgetrans", version, about = "Edge-transitive cubic graphs")]
struct Cli {
    /// Plain-text key=value file with census settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep every class and write the census directory.
    Census {
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated class ids.
        #[arg(long)]
        types: Option<String>,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Also lift every graph along elementary-abelian covers.
        #[arg(long)]
        lift: bool,
    },
    /// Type, local s and action type of each graph in a sparse6 file.
    Classify { input: Option<PathBuf> },
    /// Check every record of the inclusion ledger.
    VerifyInclusions {
        /// Only records mentioning this class.
        #[arg(long)]
        class: Option<String>,
    },
    /// Regular elementary-abelian cover of a base graph.
    Cover {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        prime: u32,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// `full` or `typed:<class>`.
        #[arg(long, default_value = "full")]
        group: String,
        /// Require the lifted group to be the full automorphism group of the cover.
        #[arg(long)]
        strong: bool,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// sparse6 conversion.
    S6 {
        #[command(subcommand)]
        dir: S6Cmd,
    },
    /// Girth, diameter, bipartiteness, hamiltonicity and symmetry of each graph.
    Invariants { input: Option<PathBuf> },
    /// Recompute growth.csv and density.csv of a census directory.
    Stats { dir: PathBuf },
}

#[derive(Subcommand)]
enum S6Cmd {
    /// Adjacency listing (`n=N` then `v: a b c` lines) or edge list (`u v`) to sparse6.
    Encode { input: Option<PathBuf> },
    /// sparse6 lines to adjacency listings.
    Decode { input: Option<PathBuf> },
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    let mut s = String::new();
    match path {
        Some(p) => s = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => {
            io::stdin().read_to_string(&mut s)?;
        }
    }
    Ok(s)
}

fn read_graphs(path: &Option<PathBuf>) -> Result<Vec<CubicGraph>, Failure> {
    read_input(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| CubicGraph::from_sparse6(l.trim()).map_err(|e| Failure::Usage(e.to_string())))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(cli) {
        Ok(()) => return ExitCode::SUCCESS,
        Err(f) => f,
    };
    match out {
        Failure::Verification(m) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Failure::Usage(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = CensusConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_kv(&std::fs::read_to_string(path)?)?;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    if cfg.jobs > 1 {
        // a second call fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Census { max_order, out: dir, types, node_budget, lift } => {
            if let Some(m) = max_order {
                cfg.set("max_order", &m.to_string())?;
            }
            if let Some(t) = types {
                cfg.set("types", &t)?;
            }
            if let Some(b) = node_budget {
                cfg.node_budget = Some(b);
            }
            if lift {
                cfg.set("lift", "on")?;
            }
            let dir = dir.or(cfg.out_dir.clone()).ok_or_else(|| Failure::Usage("census needs --out or out_dir".into()))?;
            let census = run_census(&cfg)?;
            census.write(&dir)?;
            if cli.verbose {
                write!(out, "{}", census.manifest())?;
            }
            for r in &census.records {
                writeln!(out, "{} type={} |Aut|={}", r.name(), r.class, r.aut_order)?;
            }
        }
        Cmd::Classify { input } => {
            let mut failed = 0;
            for g in read_graphs(&input)? {
                let aut = automorphism_group(&g);
                match classify_group(&g, &aut) {
                    Ok(t) => {
                        write!(out, "n={} {}", g.n(), t)?;
                        match action_type_in(&g, &aut, ACTION_TYPE_BUDGET) {
                            Ok(at) => writeln!(out, " action={}", at)?,
                            Err(_) => writeln!(out)?,
                        }
                    }
                    Err(e) => {
                        failed += 1;
                        writeln!(out, "n={} {}", g.n(), e)?;
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Verification(format!("{failed} graph(s) not classified")));
            }
        }
        Cmd::VerifyInclusions { class } => {
            let recs = catalog().list_inclusions(class.as_deref(), false)?;
            let mut recs = recs;
            if let Some(c) = &class {
                recs.extend(catalog().list_inclusions(Some(c), true)?);
            }
            let mut failures = 0;
            for rec in recs {
                let rep = verify_inclusion(rec)?;
                failures += !rep.passed() as usize;
                writeln!(out, "{}", rep)?;
                if let (true, Some((_, w))) = (cli.verbose, &rep.failure) {
                    writeln!(out, "    witness: {}", w)?;
                }
            }
            if failures > 0 {
                return Err(Failure::Verification(format!("{failures} inclusion record(s) failed")));
            }
        }
        Cmd::Cover { base, prime, dim, group, strong, budget } => {
            let g = read_graphs(&Some(base))?.into_iter().next().ok_or_else(|| Failure::Usage("empty base file".into()))?;
            let aut = automorphism_group(&g);
            let grp = match group.as_str() {
                "full" => aut.clone(),
                t => {
                    let class = t.strip_prefix("typed:").ok_or_else(|| Failure::Usage(format!("bad --group `{t}`")))?;
                    let id = catalog().get(class)?.id.clone();
                    let (subs, _) = edge_transitive_subgroups(&g, &aut, ACTION_TYPE_BUDGET)?;
                    subs.into_iter().find(|(c, _)| *c == id).map(|(_, h)| h).ok_or_else(|| Failure::Usage(format!("no {id} subgroup")))?
                }
            };
            let spec = if strong {
                make_strong_realization(&g, &grp, prime, dim, budget)?
            } else {
                let (basis, mats) = homology_action(&g, &grp, prime)?;
                let subs = invariant_subspaces(&mats, basis.beta(), prime, dim, budget)?;
                let w = subs.first().ok_or_else(|| Failure::Verification(format!("no invariant subspace of codimension {dim}")))?;
                CoverSpec::from_subspace(&g, &grp, prime, w)?
            };
            let (cover, cert) = derived_cover(&spec)?;
            if !verify_certificate(&spec, &cover, &cert) {
                return Err(Failure::Verification("lift certificate".into()));
            }
            writeln!(out, "{}", cover.sparse6())?;
            eprintln!("cover n={} base n={} p={} d={}", cover.n(), g.n(), prime, dim);
            eprintln!("lifted generators={} verified on every vertex", cert.lifts.len());
            eprintln!("covering transformations order={} regular on fibres", cert.ct_order);
            if spec.unverified_maximality {
                eprintln!("maximality unverified (cover too large)");
            }
        }
        Cmd::S6 { dir: S6Cmd::Decode { input } } => {
            for line in read_input(&input)?.lines().filter(|l| !l.trim().is_empty()) {
                let (n, edges) = sparse6_decode(line.trim())?;
                let mut adj = vec![Vec::new(); n];
                for (u, v) in edges {
                    adj[u as usize].push(v);
                    adj[v as usize].push(u);
                }
                writeln!(out, "n={n}")?;
                for (v, nb) in adj.iter_mut().enumerate() {
                    nb.sort_unstable();
                    let list: Vec<String> = nb.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "{v}: {}", list.join(" "))?;
                }
            }
        }
        Cmd::S6 { dir: S6Cmd::Encode { input } } => {
            let text = read_input(&input)?;
            let mut graphs: Vec<(usize, Vec<(u32, u32)>)> = Vec::new();
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                if let Some(n) = line.strip_prefix("n=") {
                    graphs.push((n.trim().parse()?, Vec::new()));
                    continue;
                }
                let (n, edges) = graphs.last_mut().ok_or_else(|| Failure::Usage("missing `n=` header".into()))?;
                let nums: Vec<u32> = line.replace(':', " ").split_whitespace().map(|x| x.parse()).collect::<Result<_, _>>()?;
                let (head, rest): (u32, &[u32]) = match line.contains(':') {
                    true => (nums[0], &nums[1..]),
                    false if nums.len() == 2 => (nums[0], &nums[1..]),
                    false => return Err(Failure::Usage(format!("bad line `{line}`"))),
                };
                for &v in rest {
                    if v as usize >= *n || head as usize >= *n {
                        return Err(Failure::Usage(format!("vertex out of range in `{line}`")));
                    }
                    // adjacency listings mention each edge twice
                    if !line.contains(':') || head <= v {
                        edges.push((head.min(v), head.max(v)));
                    }
                }
            }
            for (n, edges) in graphs {
                writeln!(out, "{}", sparse6_encode(n, &edges))?;
            }
        }
        Cmd::Invariants { input } => {
            for g in read_graphs(&input)? {
                let inv = g.invariants();
                let aut = automorphism_group(&g);
                let sym = symmetry_with(&g, &aut);
                let diam = inv.diameter.map_or("inf".to_string(), |d| d.to_string());
                writeln!(
                    out,
                    "n={} girth={} diameter={} bipartite={} connected={} hamiltonian={} |Aut|={} symmetry={:?}",
                    g.n(),
                    inv.girth,
                    diam,
                    inv.bipartite,
                    inv.connected,
                    hamilton_cycle(&g, cfg.hamilton_budget).label(),
                    aut.order(),
                    sym.kind
                )?;
            }
        }
        Cmd::Stats { dir } => {
            let st = Stats::load(&dir)?;
            std::fs::write(dir.join("growth.csv"), st.growth_csv())?;
            std::fs::write(dir.join("density.csv"), st.density_csv())?;
            let n = st.max_order;
            for spec in catalog().specs() {
                let f = st.f(&spec.id, n);
                if f > 0 || cli.verbose {
                    writeln!(out, "f_{}({n}) = {f}", spec.id)?;
                }
            }
        }
    }
    Ok(())
}
