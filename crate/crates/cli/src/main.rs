use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use balance_core::graph::{write_edge_list, GraphFormat};
use balance_core::numeric::{parse_rational, RationalText};
use balance_core::offline::max_density_of_graph;
use balance_core::skewness::{decompose, estimate_skew, verify_decomposition};
use balance_core::{
    bipartize, load_graph, peel_approx, read_csv, run_experiment, summarize_rows, write_csv, Algo,
    BaseGraph, ExperimentConfig, GraphSpec, Multigraph, Rational, TMode,
};

#[derive(Parser)]
#[command(
    name = "balance",
    version,
    about = "Online load balancing on random edge arrivals"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance as an edge list.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Offline optimum of a graph: max density and its ceiling.
    Opt {
        graph: PathBuf,
        /// Peeling 2-approximation instead of the exact value.
        #[arg(long)]
        approx: bool,
    },
    /// Estimate the skew parameter by doubling.
    Skew { graph: PathBuf },
    /// Decompose into skew-biregular classes and verify the result.
    Decompose {
        graph: PathBuf,
        #[arg(short)]
        s: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run trials and write one CSV row per trial and algorithm.
    Run(RunArgs),
    /// Summarize a CSV written by `run`.
    Report { csv: PathBuf },
}

#[derive(Subcommand, Clone)]
enum Family {
    Complete {
        #[arg(long)]
        n: usize,
    },
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    CompleteBipartite {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    Biregular {
        #[arg(long)]
        b_size: usize,
        #[arg(long)]
        f: u64,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        d: u64,
    },
    Layered {
        #[arg(long)]
        g: u64,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        b: u32,
    },
}

impl Family {
    fn spec(&self) -> GraphSpec {
        match *self {
            Family::Complete { n } => GraphSpec::Complete { n },
            Family::Regular { n, d, seed } => GraphSpec::Regular { n, d, seed },
            Family::CompleteBipartite { a, b } => GraphSpec::CompleteBipartite { a, b },
            Family::Biregular { b_size, f, s, d } => GraphSpec::Biregular { b_size, f, s, d },
            Family::Layered { g, t, b } => GraphSpec::Layered { g, t, b },
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Graph file (edge list or JSON).
    #[arg(short = 'g', long)]
    graph: Option<PathBuf>,
    /// Decomposition file from `decompose`.
    #[arg(short = 'd', long)]
    decomposition: Option<PathBuf>,
    /// `n` or a number of arrivals.
    #[arg(short = 'T')]
    t: Option<TMode>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated: greedy_random, greedy_left, threshold_greedy,
    /// left_assign, regime_auto.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<Algo>>,
    #[arg(long)]
    c: Option<String>,
    /// Fixed skew parameter instead of estimating it.
    #[arg(short = 's')]
    s: Option<String>,
    /// Diagnostics: greedy_components, threshold_usage.
    #[arg(long, value_delimiter = ',')]
    diag: Vec<String>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Summary as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<BaseGraph> {
    load_graph(path, GraphFormat::from_path(path))
        .with_context(|| format!("loading {}", path.display()))
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(Into::into)
}

/// The graph itself when it is already bipartite with bounded left degrees,
/// otherwise its bipartite split.
fn left_bounded(g: BaseGraph) -> Result<(BaseGraph, bool)> {
    if g.is_bipartite() {
        let rho = max_density_of_graph(&g)?.value;
        let max_left = balance_core::degree_stats(&g).max_left_degree;
        if Rational::from_integer(max_left as i64) <= rho * 4 {
            return Ok((g, false));
        }
    }
    Ok((bipartize(&g)?.graph, true))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Gen { family, out } => {
            let g = family
                .spec()
                .build(balance_core::generators::DEFAULT_EDGE_BUDGET)?;
            let mut w = output(out.as_deref())?;
            write_edge_list(&g, &mut w)?;
            w.flush()?;
        }
        Cmd::Opt { graph, approx } => {
            let g = load(&graph)?;
            if approx {
                let (value, orientation) = peel_approx(&Multigraph::from_graph(&g))?;
                println!("peel value: {}", RationalText(&value));
                println!(
                    "rho* in [{}, {}]",
                    RationalText(&value),
                    RationalText(&(value * 2))
                );
                println!("orientation max in-degree: {}", orientation.max_in_degree);
            } else {
                let cert = max_density_of_graph(&g)?;
                println!("rho*: {}", RationalText(&cert.value));
                println!("M*: {}", balance_core::numeric::ceil_u64(&cert.value));
                println!("witness size: {}", cert.witness.len());
            }
        }
        Cmd::Skew { graph } => {
            let (g, split) = left_bounded(load(&graph)?)?;
            if split {
                println!("bipartized: yes");
            }
            let (s, d) = estimate_skew(&g)?;
            println!("s_hat: {}", RationalText(&s));
            println!("rho*: {}", RationalText(&d.rho_star));
            println!("classes: {}", d.h);
        }
        Cmd::Decompose { graph, s, out } => {
            let (g, split) = left_bounded(load(&graph)?)?;
            let d = match s {
                Some(s) => {
                    let s = rational(&s)?;
                    match decompose(&g, s)? {
                        Some(d) => d,
                        None => bail!("decomposition infeasible at s = {}", RationalText(&s)),
                    }
                }
                None => estimate_skew(&g)?.1,
            };
            if split {
                eprintln!("bipartized before decomposing; edge indices are unchanged");
            }
            let report = verify_decomposition(&g, &d)?;
            eprintln!("{report}");
            let mut w = output(out.as_deref())?;
            d.write_to(&g, &mut w)?;
            w.flush()?;
            if !report.pass() {
                bail!("verification failed");
            }
        }
        Cmd::Run(args) => run(args)?,
        Cmd::Report { csv } => {
            let rows =
                read_csv(File::open(&csv).with_context(|| format!("opening {}", csv.display()))?)?;
            if rows.is_empty() {
                bail!("no rows in {}", csv.display());
            }
            let s = summarize_rows(&rows);
            println!(
                "T = {}, trials = {}, mean M* = {:.3}",
                s.t, s.trials, s.empirical_opt
            );
            println!(
                "{:<18} {:>10} {:>8} {:>10} {:>10} {:>10}",
                "algo", "mean M^A", "max M^A", "ratio", "worst", "max comp"
            );
            for a in &s.algorithms {
                println!(
                    "{:<18} {:>10.3} {:>8} {:>10.3} {:>10.3} {:>10}",
                    a.algo,
                    a.mean_max_load,
                    a.max_max_load,
                    a.competitive_ratio,
                    a.worst_ratio,
                    a.max_largest_greedy_component
                        .map_or_else(|| "-".to_string(), |c| c.to_string())
                );
            }
        }
    }
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_toml(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => {
            let Some(path) = &a.graph else {
                bail!("either --config or -g is required");
            };
            ExperimentConfig::new(
                GraphSpec::File { path: path.clone() },
                TMode::N,
                1,
                0,
                vec![Algo::GreedyRandom, Algo::ThresholdGreedy],
            )
        }
    };
    if let Some(p) = a.graph {
        cfg.graph = GraphSpec::File { path: p };
    }
    if let Some(t) = a.t {
        cfg.t = t;
    }
    if let Some(k) = a.trials {
        cfg.trials = k;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(algos) = a.algos {
        cfg.algorithms = algos;
    }
    if let Some(c) = a.c {
        cfg.c = rational(&c)?;
    }
    if let Some(s) = a.s {
        cfg.s_override = Some(rational(&s)?);
    }
    if let Some(d) = a.decomposition {
        cfg.decomposition_file = Some(d);
    }
    for d in &a.diag {
        match d.as_str() {
            "greedy_components" => cfg.diagnostics.greedy_components = true,
            "threshold_usage" => cfg.diagnostics.threshold_usage = true,
            other => bail!("unknown diagnostic {other:?}"),
        }
    }
    let out = run_experiment(&cfg)?;
    let mut w = output(a.out.as_deref())?;
    write_csv(&out.rows(), &mut w)?;
    w.flush()?;
    if let Some(p) = a.summary {
        let json = serde_json::json!({ "setup": out.setup, "summary": out.summary });
        std::fs::write(&p, serde_json::to_string_pretty(&json)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
