//! Command-line front end: sampling, decomposition, property checks,
//! multiplicity bound tables, and the Monte Carlo experiment runner.
//!
//! Statistical outcomes (a property failing, a decomposition falling short)
//! exit 0 with the result on stdout; configuration and IO problems exit
//! nonzero with the error on stderr.

use std::collections::VecDeque;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kout::bounds::{expected_m_geq_r_upper, expected_m_r, r0_with_case_split};
use kout::decomposition::{decompose, verify_decomposition};
use kout::error::Error;
use kout::graph::{BipartiteGraph, ColoredGraph, Graph};
use kout::harness::{preset, run_to_dir, ExperimentConfig, ExperimentKind};
use kout::io::{read_colored, read_graph, write_colored, write_graph};
use kout::models::{
    sample_bipartite_gnp, sample_colored, sample_coupled, sample_gnp, sample_kout,
    sample_kout_hat, sample_kout_star, sample_left_kout,
};
use kout::seed::Seed;
use kout::verify::{
    has_k_matching, has_perfect_matching, is_connected, is_hamiltonian, is_rainbow,
    rotation_budget, Outcome, PropertyVerdict, Witness,
};

#[derive(Parser)]
#[command(name = "kout", version, about = "Random k-out subgraphs, rainbow decompositions, and a verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one sample from a graph model and write it to a file.
    Sample(SampleArgs),
    /// Split an edge-colored sample of a host graph into rainbow parts.
    Decompose(DecomposeArgs),
    /// Check a property of a graph file and print the verdict.
    Verify(VerifyArgs),
    /// Print expected color-multiplicity layers and tail bounds.
    Bounds(BoundsArgs),
    /// Run a Monte Carlo experiment and write trials.csv and report.json.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Gnp,
    Colored,
    Kout,
    KoutStar,
    KoutHat,
    Coupled,
    LeftKout,
    BipartiteGnp,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Vertex count (left side for bipartite models). Ignored when --graph
    /// supplies a host.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Right side size for bipartite models; defaults to n.
    #[arg(long)]
    b: Option<usize>,
    /// Host graph file; complete host of size n when absent.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Palette size for the colored model.
    #[arg(long)]
    c: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Host graph file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for h, the parts, the remainder and diagnostics.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Connected,
    Hamiltonian,
    PerfectMatching,
    KMatching,
    Rainbow,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph file; edge-colored format for --property rainbow.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    property: Property,
    /// Stars per left vertex for k-matching.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Rotation budget for Hamiltonicity; defaults to 50 n^2.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Multiset size as a fraction of n.
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    eps: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file with the experiment parameters.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Named preset with desk-scale defaults.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Record per-trial wall time in the CSV.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE, so `kout bounds | head` would otherwise panic
    // mid-table; restore the default quiet death.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Sample(args) => run_sample(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Verify(args) => run_verify(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Experiment(args) => run_experiment_cmd(args),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_host(args: &SampleArgs) -> Result<Graph, Error> {
    match &args.graph {
        Some(path) => read_graph(path),
        None => Ok(Graph::complete(args.n)),
    }
}

fn bipartite_as_graph(b: &BipartiteGraph) -> Graph {
    let a = b.left();
    Graph::from_edges(a + b.right(), b.edges().map(|(u, v)| (u, a + v)))
        .expect("shifted bipartite edges are simple")
}

fn run_sample(args: SampleArgs) -> Result<(), Error> {
    let seed = Seed(args.seed);
    let right = args.b.unwrap_or(args.n);
    match args.model {
        Model::Gnp => {
            let host = load_host(&args)?;
            let g = sample_gnp(&host, args.p, seed);
            write_graph(&g, &args.out)?;
            println!("gnp: {} vertices, {} edges", g.n(), g.edge_count());
        }
        Model::Colored => {
            let host = load_host(&args)?;
            let c = args
                .c
                .ok_or_else(|| Error::invalid("c", "the colored model needs --c"))?;
            let cg = sample_colored(&host, args.p, c, seed);
            write_colored(&cg, &args.out)?;
            println!(
                "colored: {} vertices, {} edges, palette {}",
                cg.graph().n(),
                cg.graph().edge_count(),
                c
            );
        }
        Model::Kout | Model::KoutStar | Model::KoutHat | Model::Coupled => {
            let host = load_host(&args)?;
            let g = match args.model {
                Model::Kout => sample_kout(&host, args.k, seed)?.result,
                Model::KoutStar => sample_kout_star(&host, args.k, seed).result,
                Model::KoutHat => sample_kout_hat(&host, args.k, seed),
                _ => {
                    let outcome = sample_coupled(&host, args.k, seed);
                    println!("coupling agreed: {}", outcome.agreed);
                    outcome.h_star
                }
            };
            write_graph(&g, &args.out)?;
            println!("{}-out: {} vertices, {} edges", args.k, g.n(), g.edge_count());
        }
        Model::LeftKout => {
            let b = sample_left_kout(args.n, right, args.k, seed)?;
            write_graph(&bipartite_as_graph(&b), &args.out)?;
            println!(
                "left {}-out: parts {} + {}, right vertices shifted by {}",
                args.k,
                args.n,
                right,
                args.n
            );
        }
        Model::BipartiteGnp => {
            let b = sample_bipartite_gnp(args.n, right, args.p, seed);
            write_graph(&bipartite_as_graph(&b), &args.out)?;
            println!(
                "bipartite gnp: parts {} + {}, right vertices shifted by {}",
                args.n, right, args.n
            );
        }
    }
    Ok(())
}

/// Re-attaches h's colors to a subgraph so the written file keeps them.
fn recolor(sub: &Graph, h: &ColoredGraph) -> ColoredGraph {
    let colors = sub
        .edges()
        .iter()
        .map(|&(u, v)| h.color_of(u, v).expect("subgraph edges come from h"))
        .collect();
    ColoredGraph::new(sub.clone(), colors, h.palette()).expect("colors stay in the palette")
}

fn run_decompose(args: DecomposeArgs) -> Result<(), Error> {
    let host = read_graph(&args.graph)?;
    let res = decompose(&host, args.p, args.k, args.eps, Seed(args.seed))?;
    let report = verify_decomposition(&res);

    std::fs::create_dir_all(&args.out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    write_colored(&res.h, args.out.join("h.txt"))?;
    write_colored(&recolor(&res.remainder, &res.h), args.out.join("remainder.txt"))?;
    for (i, part) in res.parts.iter().enumerate() {
        write_colored(&recolor(part, &res.h), args.out.join(format!("part_{i:03}.txt")))?;
    }

    let diagnostics = serde_json::json!({
        "t_achieved": res.t_achieved,
        "failure_reason": res.failure_reason.as_ref().map(|r| r.to_string()),
        "verified": report.all_pass(),
        "checks": report
            .checks
            .iter()
            .map(|c| serde_json::json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect::<Vec<_>>(),
        "diagnostics": res.diagnostics,
    });
    let path = args.out.join("diagnostics.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize") + "\n",
    )
    .map_err(|source| Error::Io { path, source })?;

    match &res.failure_reason {
        None => println!(
            "decomposed into {} rainbow parts (verified: {})",
            res.t_achieved,
            report.all_pass()
        ),
        Some(reason) => println!("decomposition fell short: {reason}"),
    }
    Ok(())
}

/// Two-colors the graph by BFS; vertex lists per side, or an odd cycle
/// witness means there is none.
fn bipartition(g: &Graph) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut side = vec![None; g.n()];
    for start in 0..g.n() {
        if side[start].is_some() {
            continue;
        }
        side[start] = Some(0u8);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                match side[v] {
                    None => {
                        side[v] = Some(1 - side[u].unwrap());
                        queue.push_back(v);
                    }
                    Some(s) if s == side[u].unwrap() => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let left: Vec<usize> = (0..g.n()).filter(|&v| side[v] == Some(0)).collect();
    let right: Vec<usize> = (0..g.n()).filter(|&v| side[v] == Some(1)).collect();
    Some((left, right))
}

fn as_bipartite(g: &Graph) -> Result<(BipartiteGraph, Vec<usize>, Vec<usize>), Error> {
    let (left, right) = bipartition(g).ok_or_else(|| {
        Error::invalid("graph", "not bipartite; matching checks need a bipartite graph")
    })?;
    let index_of = |list: &[usize], v: usize| list.binary_search(&v).unwrap();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            if left.binary_search(&u).is_ok() {
                (index_of(&left, u), index_of(&right, v))
            } else {
                (index_of(&left, v), index_of(&right, u))
            }
        })
        .collect();
    let b = BipartiteGraph::from_edges(left.len(), right.len(), edges)?;
    Ok((b, left, right))
}

fn describe_witness(w: &Witness, left: &[usize], right: &[usize]) -> String {
    match w {
        Witness::Matching(m) => {
            let pairs: Vec<String> = m
                .pairs
                .iter()
                .map(|&(u, v)| format!("{}-{}", left[u], right[v]))
                .collect();
            format!("matching {}", pairs.join(" "))
        }
        Witness::KMatching(km) => format!("{} stars per left vertex", km.stars.len()),
        Witness::Cycle(order) => {
            let labels: Vec<String> = order.iter().map(|v| v.to_string()).collect();
            format!("cycle {}", labels.join(" "))
        }
        Witness::DuplicateColor { color, edges } => format!(
            "color {} repeats on {:?} and {:?}",
            color, edges[0], edges[1]
        ),
        Witness::SharedEdge { edge, parts } => {
            format!("edge {:?} appears in parts {} and {}", edge, parts.0, parts.1)
        }
        Witness::Vertex(v) => format!("vertex {v}"),
    }
}

fn print_verdict(v: &PropertyVerdict, left: &[usize], right: &[usize]) {
    let state = match &v.outcome {
        Outcome::Holds(_) => "holds",
        Outcome::Fails(_) => "fails",
        Outcome::Unknown => "unknown",
    };
    println!(
        "{}: {} ({:?}, budget spent {})",
        v.property, state, v.method, v.budget_spent
    );
    match &v.outcome {
        Outcome::Holds(w) | Outcome::Fails(Some(w)) => {
            println!("  witness: {}", describe_witness(w, left, right));
        }
        _ => {}
    }
}

fn run_verify(args: VerifyArgs) -> Result<(), Error> {
    if args.property == Property::Rainbow {
        let cg = read_colored(&args.graph)?;
        let edges: Vec<(usize, usize)> = cg.graph().edges().to_vec();
        let verdict = is_rainbow(&cg, &edges);
        print_verdict(&verdict, &[], &[]);
        return Ok(());
    }
    let g = read_graph(&args.graph)?;
    let identity: Vec<usize> = (0..g.n()).collect();
    match args.property {
        Property::Connected => print_verdict(&is_connected(&g), &identity, &identity),
        Property::Hamiltonian => {
            let budget = args.budget.unwrap_or_else(|| rotation_budget(g.n()));
            print_verdict(&is_hamiltonian(&g, budget), &identity, &identity)
        }
        Property::PerfectMatching => {
            let (b, left, right) = as_bipartite(&g)?;
            if left.len() != right.len() {
                println!(
                    "perfect-matching: fails (sides are {} and {} vertices)",
                    left.len(),
                    right.len()
                );
                return Ok(());
            }
            print_verdict(&has_perfect_matching(&b)?, &left, &right);
        }
        Property::KMatching => {
            let (b, left, right) = as_bipartite(&g)?;
            print_verdict(&has_k_matching(&b, args.k)?, &left, &right);
        }
        Property::Rainbow => unreachable!("handled above"),
    }
    Ok(())
}

fn run_bounds(args: BoundsArgs) -> Result<(), Error> {
    if !(args.alpha > 0.0 && args.alpha <= 1.0) {
        return Err(Error::invalid("alpha", "alpha must lie in (0, 1]"));
    }
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(Error::invalid("eps", "eps must lie in (0, 1)"));
    }
    if args.k < 2 || args.n == 0 {
        return Err(Error::invalid("k", "need k >= 2 and n >= 1"));
    }
    let s = (args.alpha * args.n as f64).round() as usize;
    let r0 = r0_with_case_split(args.eps, args.k, args.alpha);
    println!(
        "palette {} colors, multiset size {}, r0 = {}",
        args.k * args.n,
        s,
        r0
    );
    println!("{:>4}  {:>14}  {:>14}", "r", "mu_r", "tail m_>=r");
    let mut covered = 0.0;
    for r in 1..=r0 {
        let mu = expected_m_r(args.k, args.n, s, r);
        covered += r as f64 * mu;
        println!(
            "{r:>4}  {mu:>14.6}  {:>14.6}",
            expected_m_geq_r_upper(args.k, args.n, s, r)
        );
    }
    let floor = (1.0 - args.eps) * s as f64;
    println!(
        "sum r*mu_r over r <= r0: {covered:.4} (floor (1 - eps) alpha n = {floor:.4}: {})",
        if covered >= floor { "met" } else { "not met" }
    );
    Ok(())
}

fn run_experiment_cmd(args: ExperimentArgs) -> Result<(), Error> {
    let cfg: ExperimentConfig = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))?
        }
        (None, Some(name)) => {
            let kind = ExperimentKind::parse(name).ok_or_else(|| {
                Error::invalid(
                    "preset",
                    format!(
                        "unknown preset {name}; known: {}",
                        ExperimentKind::ALL.map(|k| k.name()).join(", ")
                    ),
                )
            })?;
            preset(kind)
        }
        _ => unreachable!("clap enforces exactly one of --config and --preset"),
    };
    let report = run_to_dir(&cfg, &args.out, args.workers, args.timings)?;
    println!(
        "{}: {} of {} trials hold {} (rate {:.4}, 99% CI [{:.4}, {:.4}])",
        report.experiment,
        report.successes,
        report.trials,
        report.property,
        report.success_rate,
        report.wilson_99.0,
        report.wilson_99.1
    );
    if report.t_target > 0 {
        println!(
            "t_target {} vs mean t_achieved {:.3} (min {}, max {})",
            report.t_target, report.mean_t_achieved, report.min_t_achieved, report.max_t_achieved
        );
    }
    if let Some(tv) = report.tv_distance {
        println!("empirical tv distance: {tv:.5}");
    }
    if let Some(rate) = report.agreement_rate {
        println!("coupling agreement rate: {rate:.5}");
    }
    println!("wrote {}", args.out.join("trials.csv").display());
    println!("wrote {}", args.out.join("report.json").display());
    Ok(())
}
