use std::fmt::Display;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use mcgap_core::carr_vempala::{decompose, min_alpha, ConvexDecomposition, CvOutcome, MinAlpha};
use mcgap_core::decomp::{self, DecompError, RootFilter};
use mcgap_core::generators::{self, GenError};
use mcgap_core::graph::{Graph, VertexId};
use mcgap_core::io::{self as mio, FrontierRow, GapReport, ParseError};
use mcgap_core::multicut::{self, MulticutInstance, PairSet, DEFAULT_NODE_BUDGET};
use mcgap_core::pload::{self, PloadResult};
use mcgap_core::rational::{self, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

mod render;

#[derive(Parser)]
#[command(name = "mcgap", version, about = "Exact multicut, multiflow and decomposition experiments")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Seed for randomized generators.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Exact fractional multicut.
    SolveLp { file: PathBuf },
    /// Exact integral multicut by branch and bound.
    SolveIp {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Gap table for one or more instances.
    Gap {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Maximum multiflow as path flows.
    Flow { file: PathBuf },
    /// Every t-diameter decomposition of the instance graph.
    DecompEnum {
        file: PathBuf,
        #[arg(long)]
        t: u64,
        /// Keep only members whose component at this vertex has radius < k.
        #[arg(long, requires = "k")]
        root: Option<String>,
        #[arg(long, requires = "root")]
        k: Option<u64>,
    },
    /// Layered decomposition of a tree.
    TreeDecomp {
        file: PathBuf,
        #[arg(long)]
        root: String,
        #[arg(long)]
        w: u64,
    },
    /// Least p admitting a p-load distribution over 2w-diameter decompositions.
    Pload {
        file: PathBuf,
        #[arg(long)]
        w: u64,
        /// Require root radius < w at this vertex.
        #[arg(long)]
        rooted: Option<String>,
        /// Also require mass on root radius < k of at least 1 - (w-k)p.
        #[arg(long, requires = "rooted")]
        radius: Option<u64>,
    },
    /// Escaping mass on m-fold 1-sums of the instance graph.
    Amplify {
        file: PathBuf,
        #[arg(long)]
        root: String,
        #[arg(long)]
        w: u64,
        /// Load bound as p/q.
        #[arg(long)]
        p: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        m: Vec<usize>,
    },
    /// Decompose alpha * OPT_LP solution into multicuts.
    CarrVempala {
        file: PathBuf,
        #[arg(long, conflicts_with = "min_alpha")]
        alpha: Option<String>,
        #[arg(long)]
        min_alpha: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Run the acceptance checks.
    VerifyAll {
        /// Run only these checks (1-9).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Two-level cactus with k blocks per level.
    Cactus { k: usize },
    /// Even cycle of length 2w with two pendant paths.
    Gadget { w: u64 },
    /// Star with every leaf pair as a pair.
    Star { leaves: usize },
    /// Random tree with random pairs and costs (uses --seed).
    Tree {
        n: usize,
        #[arg(long, default_value_t = 3)]
        pairs: usize,
        #[arg(long, default_value_t = 1)]
        max_cost: i64,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse { .. } => 2,
            CliError::Budget(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn invariant(e: impl Display) -> CliError {
    CliError::Invariant(e.to_string())
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Parameter { .. } => usage(e),
            other => invariant(other),
        }
    }
}

impl From<DecompError> for CliError {
    fn from(e: DecompError) -> Self {
        match e {
            DecompError::TooManyEdges { .. } | DecompError::ZeroBound | DecompError::ZeroWidth | DecompError::Graph(_) => {
                usage(e)
            }
            other => invariant(other),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MulticutInstance, CliError> {
    mio::parse_instance(&read_text(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// A mark name, or a raw vertex id.
fn vertex(g: &Graph, name: &str) -> Result<VertexId, CliError> {
    if let Ok(v) = g.mark(name) {
        return Ok(v);
    }
    let v: VertexId = name
        .parse()
        .map_err(|_| usage(format!("no vertex or mark named `{name}`")))?;
    g.check_vertex(v).map_err(usage)?;
    Ok(v)
}

fn parse_rational(text: &str, what: &str) -> Result<Rational, CliError> {
    rational::parse(text).ok_or_else(|| usage(format!("{what}: expected p/q, found `{text}`")))
}

struct Output {
    body: String,
    /// Non-zero exit after the body is written.
    deferred: Option<CliError>,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, deferred: None }
    }
}

fn table(format: Format, title: Option<String>, csv: String) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(csv),
        Format::Text => {
            let mut out = title.map(|t| t + "\n").unwrap_or_default();
            out.push_str(&render::aligned(&csv).map_err(invariant)?);
            Ok(out)
        }
    }
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("UTF-8")
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let f = cli.format;
    match &cli.command {
        Command::Gen { family } => {
            let inst = match family {
                Family::Cactus { k } => generators::gen_cactus_gap(*k)?.instance,
                Family::Gadget { w } => {
                    let g = generators::gen_cycle_gadget(*w)?.graph;
                    MulticutInstance::with_unit_costs(g, PairSet::Explicit(vec![])).map_err(invariant)?
                }
                Family::Star { leaves } => generators::gen_star_gap(*leaves)?,
                Family::Tree { n, pairs, max_cost } => {
                    if *n < 2 || *max_cost < 1 {
                        return Err(usage("tree needs n >= 2 and max-cost >= 1"));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let g = generators::random_tree(*n, &mut rng);
                    let list = generators::random_pairs(*n, *pairs, &mut rng);
                    let costs = generators::random_costs(n - 1, *max_cost, &mut rng);
                    MulticutInstance::new(g, costs, PairSet::Explicit(list)).map_err(invariant)?
                }
            };
            Ok(Output::ok(mio::emit_instance(&inst)))
        }
        Command::SolveLp { file } => {
            let inst = load(file)?;
            let start = Instant::now();
            let sol = multicut::solve_fractional(&inst).map_err(invariant)?;
            eprintln!("opt_lp = {} ({:.2?})", fmt(&sol.value), start.elapsed());
            let g = inst.graph();
            let csv = csv_rows(
                &["edge", "u", "v", "cost", "x"],
                g.edges().iter().enumerate().map(|(e, edge)| {
                    vec![e.to_string(), edge.u.to_string(), edge.v.to_string(), fmt(&inst.costs()[e]), fmt(&sol.x[e])]
                }),
            );
            Ok(Output::ok(table(f, Some(format!("opt_lp {}", fmt(&sol.value))), csv)?))
        }
        Command::SolveIp { file, budget } => {
            let inst = load(file)?;
            let start = Instant::now();
            let res = multicut::solve_integral(&inst, *budget).map_err(invariant)?;
            eprintln!("opt_ip = {} after {} nodes ({:.2?})", fmt(&res.solution.cost), res.nodes, start.elapsed());
            let g = inst.graph();
            let csv = csv_rows(
                &["edge", "u", "v", "cost"],
                res.solution.edges.iter().map(|e| {
                    let edge = &g.edges()[e];
                    vec![e.to_string(), edge.u.to_string(), edge.v.to_string(), fmt(&inst.costs()[e])]
                }),
            );
            let title = if res.optimal {
                format!("opt_ip {}", fmt(&res.solution.cost))
            } else {
                format!("best {} lower bound {}", fmt(&res.solution.cost), fmt(&res.lower_bound))
            };
            Ok(Output {
                body: table(f, Some(title), csv)?,
                deferred: (!res.optimal).then(|| {
                    CliError::Budget(format!(
                        "node budget {budget} exhausted: best {} lower bound {}",
                        fmt(&res.solution.cost),
                        fmt(&res.lower_bound)
                    ))
                }),
            })
        }
        Command::Gap { files, budget } => {
            let instances = files.iter().map(|p| load(p).map(|i| (p, i))).collect::<Result<Vec<_>, _>>()?;
            let results: Vec<_> = instances
                .par_iter()
                .map(|(path, inst)| {
                    let start = Instant::now();
                    let res = multicut::gap(inst, *budget).map_err(invariant)?;
                    let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
                    Ok((GapReport::new(name, inst, &res), start.elapsed()))
                })
                .collect::<Result<_, CliError>>()?;
            for (report, took) in &results {
                eprintln!("{}: {took:.2?}", report.instance);
            }
            let reports: Vec<GapReport> = results.into_iter().map(|(r, _)| r).collect();
            let open = reports.iter().filter(|r| !r.ip_optimal).count();
            Ok(Output {
                body: table(f, None, mio::emit_report(&reports))?,
                deferred: (open > 0).then(|| CliError::Budget(format!("{open} instance(s) hit the node budget"))),
            })
        }
        Command::Flow { file } => {
            let inst = load(file)?;
            let (_, master) = multicut::solve_fractional_with_master(&inst).map_err(invariant)?;
            let flow = multicut::extract_multiflow(&master);
            if !flow.verify(&inst) {
                return Err(invariant("extracted multiflow violates a capacity"));
            }
            let csv = csv_rows(
                &["path_id", "s", "t", "flow", "vertices"],
                flow.paths.iter().enumerate().map(|(i, p)| {
                    let vs: Vec<String> = p.path.vertices.iter().map(|v| v.to_string()).collect();
                    vec![i.to_string(), p.pair.0.to_string(), p.pair.1.to_string(), fmt(&p.flow), vs.join(" ")]
                }),
            );
            Ok(Output::ok(table(f, Some(format!("total {}", fmt(&flow.total))), csv)?))
        }
        Command::DecompEnum { file, t, root, k } => {
            let inst = load(file)?;
            let g = inst.graph();
            let filter = match (root, k) {
                (Some(r), Some(k)) => Some(RootFilter { root: vertex(g, r)?, k: *k }),
                _ => None,
            };
            let family = decomp::enumerate(g, *t, filter)?;
            let csv = mio::emit_family(&family, filter.map(|r| r.root));
            Ok(Output::ok(table(f, Some(format!("{} members", family.len())), csv)?))
        }
        Command::TreeDecomp { file, root, w } => {
            let inst = load(file)?;
            let g = inst.graph();
            let r = vertex(g, root)?;
            let layers = decomp::tree_family(g, r, *w)?;
            let report = decomp::verify_tree_properties(g, r, *w)?;
            let csv = csv_rows(
                &["layer", "weight", "diameter", "radius", "edges"],
                layers.iter().enumerate().map(|(i, l)| {
                    let edges: Vec<String> = l.iter().map(|e| e.to_string()).collect();
                    vec![
                        i.to_string(),
                        format!("1/{w}"),
                        report.diameters[i].to_string(),
                        report.radii[i].to_string(),
                        edges.join(" "),
                    ]
                }),
            );
            Ok(Output::ok(table(f, Some("all layer properties hold".into()), csv)?))
        }
        Command::Pload { file, w, rooted, radius } => {
            let inst = load(file)?;
            let g = inst.graph();
            let start = Instant::now();
            let res: PloadResult = match (rooted, radius) {
                (None, _) => pload::min_pload(g, *w),
                (Some(r), None) => pload::min_pload_rooted(g, vertex(g, r)?, *w),
                (Some(r), Some(k)) => pload::min_pload_radius(g, vertex(g, r)?, *w, *k),
            }
            .map_err(|e| match e {
                pload::PloadError::Decomp(d) => CliError::from(d),
                pload::PloadError::ZeroWidth | pload::PloadError::RadiusBound { .. } | pload::PloadError::Graph(_) => usage(e),
                other => invariant(other),
            })?;
            res.verify().map_err(invariant)?;
            eprintln!("p = {} ({:.2?})", fmt(&res.p), start.elapsed());
            let row = FrontierRow {
                w: res.w,
                k: res.k,
                m: 1,
                p: res.p.clone(),
                family_size: res.family_size,
                pivots: res.pivots,
            };
            Ok(Output::ok(table(f, None, mio::emit_frontier(&[row]))?))
        }
        Command::Amplify { file, root, w, p, m } => {
            let inst = load(file)?;
            let g = inst.graph();
            let r = vertex(g, root)?;
            let p = parse_rational(p, "--p")?;
            if m.contains(&0) {
                return Err(usage("--m values must be positive"));
            }
            let rows = pload::amplification_experiment(g, r, *w, &p, m).map_err(|e| match e {
                pload::PloadError::Decomp(d) => CliError::from(d),
                other => invariant(other),
            })?;
            let csv = csv_rows(
                &["m", "edges", "family_size", "z", "mz", "pivots"],
                rows.iter().map(|row| {
                    let (z, mz) = match &row.z {
                        Some(z) => (fmt(z), fmt(&(z * rational::int(row.m as i64)))),
                        None => ("infeasible".into(), String::new()),
                    };
                    vec![row.m.to_string(), row.edges.to_string(), row.family_size.to_string(), z, mz, row.pivots.to_string()]
                }),
            );
            Ok(Output::ok(table(f, Some(format!("p {}", fmt(&p))), csv)?))
        }
        Command::CarrVempala { file, alpha, min_alpha: _, budget } => {
            let inst = load(file)?;
            let lp = multicut::solve_fractional(&inst).map_err(invariant)?;
            let x = lp.x;
            let verified = |dec: &ConvexDecomposition| dec.verify(&inst, &x).map_err(invariant);
            match alpha {
                Some(text) => {
                    let a = parse_rational(text, "--alpha")?;
                    if a <= Rational::from_integer(0.into()) {
                        return Err(usage("--alpha must be positive"));
                    }
                    match decompose(&inst, &x, &a, *budget).map_err(invariant)? {
                        CvOutcome::Decomposition(dec) => {
                            verified(&dec)?;
                            let title = format!("alpha {} decomposes", fmt(&dec.alpha));
                            Ok(Output::ok(table(f, Some(title), mio::emit_decomposition(&dec))?))
                        }
                        CvOutcome::Witness(wit) => {
                            if !wit.verify(&inst, &x, *budget).map_err(invariant)? {
                                return Err(invariant("witness failed its own check"));
                            }
                            let csv = csv_rows(
                                &["edge", "c", "x"],
                                wit.c.iter().zip(&x).enumerate().map(|(e, (c, xe))| vec![e.to_string(), fmt(c), fmt(xe)]),
                            );
                            let title = format!("alpha {} is too small: c(F) >= {} for every multicut F", fmt(&a), fmt(&wit.u));
                            Ok(Output::ok(table(f, Some(title), csv)?))
                        }
                        CvOutcome::Inconclusive { master_value } => Err(CliError::Budget(format!(
                            "pricing budget exhausted at master value {}",
                            fmt(&master_value)
                        ))),
                    }
                }
                None => {
                    let (a, dec, exact) = match min_alpha(&inst, &x, *budget).map_err(invariant)? {
                        MinAlpha::Exact { alpha, decomposition } => (alpha, decomposition, true),
                        MinAlpha::Bound { alpha, decomposition } => (alpha, decomposition, false),
                    };
                    verified(&dec)?;
                    eprintln!("min alpha {} ({})", fmt(&a), if exact { "exact" } else { "upper bound" });
                    let title = format!("min alpha {}", fmt(&a));
                    Ok(Output {
                        body: table(f, Some(title), mio::emit_decomposition(&dec))?,
                        deferred: (!exact).then(|| CliError::Budget(format!("only an upper bound {}", fmt(&a)))),
                    })
                }
            }
        }
        Command::VerifyAll { only } => {
            let ids: Vec<usize> = if only.is_empty() {
                (1..=mcgap_verify::criteria::COUNT).collect()
            } else {
                only.clone()
            };
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > mcgap_verify::criteria::COUNT) {
                return Err(usage(format!("no check {bad}")));
            }
            let mut body = String::new();
            let mut failed = 0;
            for id in ids {
                let o = mcgap_verify::criteria::run(id);
                let status = if o.pass { "PASS" } else { "FAIL" };
                body.push_str(&format!("{status} {} {}: {}\n", o.id, o.title, o.details));
                eprintln!("check {} took {:.2?}", o.id, o.elapsed);
                failed += usize::from(!o.pass);
            }
            Ok(Output {
                body,
                deferred: (failed > 0).then(|| invariant(format!("{failed} check(s) failed"))),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &out.body).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout().write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match out.deferred {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
        None => ExitCode::SUCCESS,
    }
}
