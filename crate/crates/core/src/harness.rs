//! Experiment orchestration: configuration, shared preparation, parallel
//! trials, and CSV/JSON reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generators::{
    gen_biregular_imbalanced, gen_complete, gen_complete_bipartite, gen_layered_lb, gen_regular,
    GenError, LayeredLBParams,
};
use crate::graph::{
    child_seed, components, degree_stats, load_graph, sample_iid, BaseGraph, GraphError,
    GraphFormat, SampledStream,
};
use crate::numeric::{parse_rational, Rational, RationalText};
use crate::offline::{
    bipartize, lower_bounds_with, max_density_of_graph, offline_opt, offline_opt_approx,
    Bipartization, LowerBounds, OfflineError,
};
use crate::online::{
    augmented_graph, left_cap_exceeded, make_thresholds, run_greedy, run_left_assign,
    run_threshold_greedy, select_regime, LoadState, OnlineError, PlannedAlgorithm, RegimeCase,
    ThresholdVector, TieBreak,
};
use crate::skewness::{decompose, estimate_skew, Decomposition, SkewError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Skew(#[from] SkewError),
    #[error(transparent)]
    Online(#[from] OnlineError),
    #[error("decomposition infeasible at s = {0}")]
    Infeasible(String),
    #[error("trial {trial}: {algo} reached max load {load} below the offline optimum {opt}")]
    BelowOptimum {
        trial: usize,
        algo: Algo,
        load: u64,
        opt: u64,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Where the base graph comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphSpec {
    File {
        path: PathBuf,
    },
    Complete {
        n: usize,
    },
    Regular {
        n: usize,
        d: usize,
        seed: u64,
    },
    CompleteBipartite {
        a: usize,
        b: usize,
    },
    Biregular {
        b_size: usize,
        f: u64,
        s: u32,
        d: u64,
    },
    Layered {
        g: u64,
        t: u64,
        b: u32,
    },
}

impl GraphSpec {
    pub fn build(&self, edge_budget: u64) -> Result<BaseGraph, HarnessError> {
        Ok(match self {
            GraphSpec::File { path } => load_graph(path, GraphFormat::from_path(path))?,
            GraphSpec::Complete { n } => gen_complete(*n)?,
            GraphSpec::Regular { n, d, seed } => gen_regular(*n, *d, *seed)?,
            GraphSpec::CompleteBipartite { a, b } => gen_complete_bipartite(*a, *b)?,
            GraphSpec::Biregular { b_size, f, s, d } => {
                gen_biregular_imbalanced(*b_size, *f, *s, *d)?
            }
            GraphSpec::Layered { g, t, b } => gen_layered_lb(
                LayeredLBParams {
                    group_size: *g,
                    ratio: *t,
                    layers: *b,
                },
                edge_budget,
            )?,
        })
    }
}

/// Number of arrivals: the vertex count, or a fixed number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TMode {
    N,
    Fixed(u64),
}

impl TMode {
    pub fn resolve(self, n: usize) -> u64 {
        match self {
            TMode::N => n as u64,
            TMode::Fixed(t) => t,
        }
    }
}

impl FromStr for TMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "n" {
            return Ok(TMode::N);
        }
        s.trim()
            .parse()
            .map(TMode::Fixed)
            .map_err(|_| format!("T must be `n` or an integer, got {s:?}"))
    }
}

impl fmt::Display for TMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TMode::N => write!(f, "n"),
            TMode::Fixed(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for TMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TMode::N => s.serialize_str("n"),
            TMode::Fixed(t) => s.serialize_u64(*t),
        }
    }
}

impl<'de> Deserialize<'de> for TMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(t) => Ok(TMode::Fixed(t)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    GreedyRandom,
    GreedyLeft,
    ThresholdGreedy,
    LeftAssign,
    RegimeAuto,
}

impl Algo {
    pub const ALL: [Algo; 5] = [
        Algo::GreedyRandom,
        Algo::GreedyLeft,
        Algo::ThresholdGreedy,
        Algo::LeftAssign,
        Algo::RegimeAuto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::GreedyRandom => "greedy_random",
            Algo::GreedyLeft => "greedy_left",
            Algo::ThresholdGreedy => "threshold_greedy",
            Algo::LeftAssign => "left_assign",
            Algo::RegimeAuto => "regime_auto",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Diagnostics {
    pub greedy_components: bool,
    pub threshold_usage: bool,
}

mod rational_text {
    use super::*;

    pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&RationalText(r).to_string())
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Rational::from_integer(i)),
            Repr::Text(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: serde::Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => super::serialize(r, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: serde::Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Rational>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] Rational);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

fn default_c() -> Rational {
    Rational::from_integer(8)
}

fn default_opt_budget() -> u64 {
    5_000_000
}

fn default_graph_budget() -> u64 {
    crate::generators::DEFAULT_EDGE_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(rename = "T")]
    pub t: TMode,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algo>,
    #[serde(with = "rational_text", default = "default_c")]
    pub c: Rational,
    #[serde(
        with = "rational_text::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub s_override: Option<Rational>,
    /// Decomposition written by `decompose` for this graph, used instead of
    /// estimating one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition_file: Option<PathBuf>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    /// Samples with more arrivals than this get the peeling estimate of `M*`.
    #[serde(default = "default_opt_budget")]
    pub opt_edge_budget: u64,
    /// Cap on generated and augmented edge counts.
    #[serde(default = "default_graph_budget")]
    pub graph_edge_budget: u64,
}

impl ExperimentConfig {
    pub fn new(
        graph: GraphSpec,
        t: TMode,
        trials: usize,
        seed: u64,
        algorithms: Vec<Algo>,
    ) -> Self {
        ExperimentConfig {
            graph,
            t,
            trials,
            seed,
            algorithms,
            c: default_c(),
            s_override: None,
            decomposition_file: None,
            diagnostics: Diagnostics::default(),
            opt_edge_budget: default_opt_budget(),
            graph_edge_budget: default_graph_budget(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("no algorithms selected".into()));
        }
        if self.c <= Rational::from_integer(0) {
            return Err(HarnessError::Config("c must be positive".into()));
        }
        if self
            .s_override
            .is_some_and(|s| s < Rational::from_integer(1))
        {
            return Err(HarnessError::Config("s must be at least 1".into()));
        }
        Ok(())
    }
}

/// One step of mapping loads back towards the base graph.
#[derive(Debug, Clone)]
enum Lift {
    Merge(Bipartization),
    Truncate(usize),
}

fn lift(mut loads: Vec<u64>, steps: &[Lift]) -> Vec<u64> {
    for s in steps {
        loads = match s {
            Lift::Merge(b) => b.translate_loads(&loads),
            Lift::Truncate(n) => {
                loads.truncate(*n);
                loads
            }
        };
    }
    loads
}

/// A bipartite, left-degree-bounded graph the non-greedy algorithms run on.
/// Its edge indices extend those of the base graph.
#[derive(Debug, Clone)]
struct Working {
    graph: BaseGraph,
    /// innermost first
    lift: Vec<Lift>,
    rho_star: Rational,
    bipartized: bool,
}

fn make_working(g: &BaseGraph, lift: Vec<Lift>) -> Result<Working, HarnessError> {
    if g.is_bipartite() {
        let rho = max_density_of_graph(g)?.value;
        let max_left = degree_stats(g).max_left_degree;
        if Rational::from_integer(max_left as i64) <= rho * 4 {
            return Ok(Working {
                graph: g.clone(),
                lift,
                rho_star: rho,
                bipartized: false,
            });
        }
    }
    let b = bipartize(g)?;
    let rho = max_density_of_graph(&b.graph)?.value;
    let mut steps = vec![Lift::Merge(b.clone())];
    steps.extend(lift);
    Ok(Working {
        graph: b.graph,
        lift: steps,
        rho_star: rho,
        bipartized: true,
    })
}

#[derive(Debug, Clone)]
struct ThresholdPrep {
    work: Working,
    decomposition: Decomposition,
    thresholds: ThresholdVector,
}

fn prepare_threshold(
    work: Working,
    cfg: &ExperimentConfig,
    allow_file: bool,
) -> Result<ThresholdPrep, HarnessError> {
    let from_file = match (&cfg.decomposition_file, allow_file) {
        (Some(p), true) => Some(Decomposition::parse(
            &work.graph,
            &std::fs::read_to_string(p)?,
        )?),
        _ => None,
    };
    let d = match (from_file, cfg.s_override) {
        (Some(d), _) => d,
        (None, s_override) => match s_override {
            Some(s) => decompose(&work.graph, s)?
                .ok_or_else(|| HarnessError::Infeasible(RationalText(&s).to_string()))?,
            None => estimate_skew(&work.graph)?.1,
        },
    };
    let stats = degree_stats(&work.graph);
    let thresholds = make_thresholds(
        work.rho_star,
        stats.avg_degree,
        d.skew_param,
        work.graph.vertex_count(),
        cfg.c,
        d.h,
    );
    Ok(ThresholdPrep {
        work,
        decomposition: d,
        thresholds,
    })
}

#[derive(Debug, Clone)]
enum AutoPrep {
    Greedy,
    LeftAssign,
    /// Threshold-Greedy on the plain working graph.
    Threshold,
    /// Threshold-Greedy prepared on an augmented graph.
    Augmented(Box<ThresholdPrep>),
}

/// Facts about the shared preparation, reported alongside the trials.
#[derive(Debug, Clone, Serialize)]
pub struct SetupInfo {
    pub vertex_count: usize,
    pub edge_count: usize,
    #[serde(rename = "T")]
    pub t: u64,
    pub graph_hash: String,
    pub rho_star: Option<String>,
    pub density_lb: Option<String>,
    pub multiplicity_lb: Option<f64>,
    pub bipartized: bool,
    pub skew: Option<String>,
    pub classes: Option<usize>,
    pub alpha: Option<Vec<u64>>,
    pub regime: Option<String>,
    pub offline_exact: bool,
}

struct Prepared {
    base: BaseGraph,
    t: u64,
    work: Option<Working>,
    threshold: Option<ThresholdPrep>,
    auto: Option<AutoPrep>,
    info: SetupInfo,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    cfg.validate()?;
    let base = cfg.graph.build(cfg.graph_edge_budget)?;
    if base.is_empty() {
        return Err(HarnessError::Offline(OfflineError::EmptyGraph));
    }
    let t = cfg.t.resolve(base.vertex_count());
    if t == 0 {
        return Err(HarnessError::Config("T must be at least 1".into()));
    }
    let wants = |a: Algo| cfg.algorithms.contains(&a);
    let needs_work =
        wants(Algo::ThresholdGreedy) || wants(Algo::LeftAssign) || wants(Algo::RegimeAuto);
    let work = if needs_work {
        Some(make_working(&base, Vec::new())?)
    } else {
        None
    };

    let mut auto = None;
    let mut regime = None;
    if wants(Algo::RegimeAuto) {
        let w = work.as_ref().unwrap();
        let mut plan = select_regime(&base, t);
        if plan.algorithm == PlannedAlgorithm::ThresholdGreedy && left_cap_exceeded(&w.graph) {
            plan.algorithm = PlannedAlgorithm::LeftAssign;
            plan.left_cap_exceeded = true;
        }
        regime = Some(format!(
            "{:?} -> {:?} (isolated {}, cliques {} of size {})",
            plan.case,
            plan.algorithm,
            plan.isolated_added,
            plan.num_cliques,
            plan.clique_size.unwrap_or(0)
        ));
        auto = Some(match plan.algorithm {
            PlannedAlgorithm::Greedy => AutoPrep::Greedy,
            PlannedAlgorithm::LeftAssign => AutoPrep::LeftAssign,
            PlannedAlgorithm::ThresholdGreedy => {
                match augmented_graph(&base, &plan, cfg.graph_edge_budget)? {
                    None => AutoPrep::Threshold,
                    Some(aug) => {
                        let w = make_working(&aug, vec![Lift::Truncate(base.vertex_count())])?;
                        AutoPrep::Augmented(Box::new(prepare_threshold(w, cfg, false)?))
                    }
                }
            }
        });
        debug_assert!(plan.case != RegimeCase::Tiny || matches!(auto, Some(AutoPrep::Greedy)));
    }

    let threshold = if wants(Algo::ThresholdGreedy) || matches!(auto, Some(AutoPrep::Threshold)) {
        Some(prepare_threshold(work.clone().unwrap(), cfg, true)?)
    } else {
        None
    };

    // ρ* of the base graph for the reference bounds; reuse the working
    // graph's value when it is the base graph itself
    let rho_base = match &work {
        Some(w) if !w.bipartized => Some(w.rho_star),
        _ if base.implicit_complete_order().is_some()
            || base.edge_count() as u64 <= cfg.opt_edge_budget =>
        {
            Some(max_density_of_graph(&base)?.value)
        }
        _ => None,
    };
    let lb: Option<LowerBounds> = rho_base.map(|r| lower_bounds_with(&base, t, r));
    let info = SetupInfo {
        vertex_count: base.vertex_count(),
        edge_count: base.edge_count(),
        t,
        graph_hash: base.content_hash(),
        rho_star: rho_base.map(|r| RationalText(&r).to_string()),
        density_lb: lb.as_ref().map(|l| RationalText(&l.density_lb).to_string()),
        multiplicity_lb: lb.as_ref().map(|l| l.multiplicity_lb),
        bipartized: work.as_ref().is_some_and(|w| w.bipartized),
        skew: threshold
            .as_ref()
            .map(|p| RationalText(&p.decomposition.skew_param).to_string()),
        classes: threshold.as_ref().map(|p| p.decomposition.h),
        alpha: threshold.as_ref().map(|p| p.thresholds.alpha.clone()),
        regime,
        offline_exact: t <= cfg.opt_edge_budget,
    };
    Ok(Prepared {
        base,
        t,
        work,
        threshold,
        auto,
        info,
    })
}

/// Result of one algorithm in one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoResult {
    pub algo: Algo,
    pub max_load: u64,
    pub ratio: f64,
    pub largest_greedy_component: Option<usize>,
    pub alpha_sum: Option<u64>,
    pub threshold_usage: Option<Vec<u64>>,
    /// Steps where a class load went past its threshold.
    pub cap_violations: u64,
    /// Base-graph loads sum to `T`.
    pub conserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial_index: usize,
    pub seed: u64,
    pub offline_opt: u64,
    pub offline_exact: bool,
    pub results: Vec<AlgoResult>,
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub trial: usize,
    pub algo: String,
    #[serde(rename = "T")]
    pub t: u64,
    pub max_load: u64,
    pub offline_opt: u64,
    pub ratio: String,
    pub largest_greedy_component: Option<usize>,
    pub alpha_sum: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutput {
    pub setup: SetupInfo,
    pub reports: Vec<TrialReport>,
    pub summary: Summary,
}

impl ExperimentOutput {
    pub fn rows(&self) -> Vec<CsvRow> {
        rows_of(&self.reports, self.setup.t)
    }
}

fn rows_of(reports: &[TrialReport], t: u64) -> Vec<CsvRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.results.iter().map(move |a| CsvRow {
                trial: r.trial_index,
                algo: a.algo.name().to_string(),
                t,
                max_load: a.max_load,
                offline_opt: r.offline_opt,
                ratio: format!("{:.6}", a.ratio),
                largest_greedy_component: a.largest_greedy_component,
                alpha_sum: a.alpha_sum,
                seed: r.seed,
            })
        })
        .collect()
}

struct RunOutcome {
    state: LoadState,
    /// graph the state's vertex and edge indices refer to
    graph: BaseGraph,
    lift: Vec<Lift>,
    thresholds: Option<u64>,
}

fn run_prepared_threshold(
    p: &ThresholdPrep,
    sample: &SampledStream,
) -> Result<RunOutcome, HarnessError> {
    let state = run_threshold_greedy(&p.work.graph, &p.decomposition, &p.thresholds, sample)?;
    Ok(RunOutcome {
        state,
        graph: p.work.graph.clone(),
        lift: p.work.lift.clone(),
        thresholds: Some(p.thresholds.alpha_sum()),
    })
}

fn run_algo(
    prep: &Prepared,
    algo: Algo,
    sample: &SampledStream,
    tie_seed: u64,
) -> Result<RunOutcome, HarnessError> {
    let greedy = |tie| RunOutcome {
        state: run_greedy(&prep.base, sample, tie),
        graph: prep.base.clone(),
        lift: Vec::new(),
        thresholds: None,
    };
    let left = || -> Result<RunOutcome, HarnessError> {
        let w = prep.work.as_ref().unwrap();
        Ok(RunOutcome {
            state: run_left_assign(&w.graph, sample)?,
            graph: w.graph.clone(),
            lift: w.lift.clone(),
            thresholds: None,
        })
    };
    match algo {
        Algo::GreedyRandom => Ok(greedy(TieBreak::Random(tie_seed))),
        Algo::GreedyLeft => Ok(greedy(TieBreak::PreferLeft)),
        Algo::LeftAssign => left(),
        Algo::ThresholdGreedy => run_prepared_threshold(prep.threshold.as_ref().unwrap(), sample),
        Algo::RegimeAuto => match prep.auto.as_ref().unwrap() {
            AutoPrep::Greedy => Ok(greedy(TieBreak::Random(tie_seed))),
            AutoPrep::LeftAssign => left(),
            AutoPrep::Threshold => run_prepared_threshold(prep.threshold.as_ref().unwrap(), sample),
            AutoPrep::Augmented(p) => run_prepared_threshold(p, sample),
        },
    }
}

fn run_trial(
    prep: &Prepared,
    cfg: &ExperimentConfig,
    trial: usize,
) -> Result<TrialReport, HarnessError> {
    let seed = child_seed(cfg.seed, trial as u64);
    let sample = sample_iid(&prep.base, prep.t as usize, seed)?;
    let tie_seed = child_seed(seed, 1);
    let exact = prep.t <= cfg.opt_edge_budget;
    let opt = if exact {
        offline_opt(&prep.base, &sample)
    } else {
        offline_opt_approx(&prep.base, &sample)
    };
    let mut results = Vec::with_capacity(cfg.algorithms.len());
    for &algo in &cfg.algorithms {
        let out = run_algo(prep, algo, &sample, tie_seed)?;
        let loads = lift(out.state.total_load.clone(), &out.lift);
        let max_load = loads.iter().copied().max().unwrap_or(0);
        if max_load < opt {
            return Err(HarnessError::BelowOptimum {
                trial,
                algo,
                load: max_load,
                opt,
            });
        }
        let is_threshold = out.thresholds.is_some();
        let largest = (is_threshold && cfg.diagnostics.greedy_components).then(|| {
            diagnostic_greedy_components(&out.state, &out.graph)
                .first()
                .copied()
                .unwrap_or(0)
        });
        results.push(AlgoResult {
            algo,
            max_load,
            ratio: max_load as f64 / opt as f64,
            largest_greedy_component: largest,
            alpha_sum: out.thresholds,
            threshold_usage: (is_threshold && cfg.diagnostics.threshold_usage)
                .then(|| out.state.threshold_usage()),
            cap_violations: out.state.cap_violations,
            conserved: loads.iter().sum::<u64>() == prep.t,
        });
    }
    Ok(TrialReport {
        trial_index: trial,
        seed,
        offline_opt: opt,
        offline_exact: exact,
        results,
    })
}

/// Runs every trial (in parallel) and summarizes. Output depends only on the
/// configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let prep = prepare(cfg)?;
    let reports = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(&prep, cfg, i))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&reports, prep.t);
    Ok(ExperimentOutput {
        setup: prep.info,
        reports,
        summary,
    })
}

/// Sizes of the connected components formed by the greedy-rule edges,
/// largest first.
pub fn diagnostic_greedy_components(state: &LoadState, g: &BaseGraph) -> Vec<usize> {
    if state.greedy_edges.is_empty() {
        return Vec::new();
    }
    components(g, &state.greedy_edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub algo: String,
    pub trials: usize,
    pub mean_max_load: f64,
    pub max_max_load: u64,
    pub mean_offline_opt: f64,
    pub min_offline_opt: u64,
    pub max_offline_opt: u64,
    /// `mean(M^A) / mean(M*)`
    pub competitive_ratio: f64,
    pub worst_ratio: f64,
    pub max_largest_greedy_component: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "T")]
    pub t: u64,
    pub trials: usize,
    /// Estimate of the expected optimum: mean `M*` over trials.
    pub empirical_opt: f64,
    pub algorithms: Vec<AlgoSummary>,
}

pub fn summarize(reports: &[TrialReport], t: u64) -> Summary {
    summarize_rows(&rows_of(reports, t))
}

/// Summary from CSV rows; algorithms keep their first-seen order.
pub fn summarize_rows(rows: &[CsvRow]) -> Summary {
    let mut order: Vec<&str> = Vec::new();
    let mut by_algo: BTreeMap<&str, Vec<&CsvRow>> = BTreeMap::new();
    let mut opt_by_trial: BTreeMap<usize, u64> = BTreeMap::new();
    for r in rows {
        if !by_algo.contains_key(r.algo.as_str()) {
            order.push(&r.algo);
        }
        by_algo.entry(&r.algo).or_default().push(r);
        opt_by_trial.insert(r.trial, r.offline_opt);
    }
    let mean = |xs: &mut dyn Iterator<Item = u64>| {
        let (s, c) = xs.fold((0u64, 0usize), |(s, c), x| (s + x, c + 1));
        if c == 0 {
            0.0
        } else {
            s as f64 / c as f64
        }
    };
    let algorithms = order
        .iter()
        .map(|&a| {
            let rs = &by_algo[a];
            let mean_load = mean(&mut rs.iter().map(|r| r.max_load));
            let mean_opt = mean(&mut rs.iter().map(|r| r.offline_opt));
            AlgoSummary {
                algo: a.to_string(),
                trials: rs.len(),
                mean_max_load: mean_load,
                max_max_load: rs.iter().map(|r| r.max_load).max().unwrap_or(0),
                mean_offline_opt: mean_opt,
                min_offline_opt: rs.iter().map(|r| r.offline_opt).min().unwrap_or(0),
                max_offline_opt: rs.iter().map(|r| r.offline_opt).max().unwrap_or(0),
                competitive_ratio: if mean_opt > 0.0 {
                    mean_load / mean_opt
                } else {
                    0.0
                },
                worst_ratio: rs
                    .iter()
                    .filter(|r| r.offline_opt > 0)
                    .map(|r| r.max_load as f64 / r.offline_opt as f64)
                    .fold(0.0, f64::max),
                max_largest_greedy_component: rs
                    .iter()
                    .filter_map(|r| r.largest_greedy_component)
                    .max(),
            }
        })
        .collect();
    Summary {
        t: rows.first().map_or(0, |r| r.t),
        trials: opt_by_trial.len(),
        empirical_opt: mean(&mut opt_by_trial.values().copied()),
        algorithms,
    }
}

pub fn write_csv<W: std::io::Write>(rows: &[CsvRow], w: W) -> Result<(), HarnessError> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<CsvRow>, HarnessError> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(HarnessError::Config(format!(
            "unexpected CSV header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    Ok(rd.deserialize().collect::<Result<Vec<CsvRow>, _>>()?)
}

pub const CSV_COLUMNS: [&str; 9] = [
    "trial",
    "algo",
    "T",
    "max_load",
    "offline_opt",
    "ratio",
    "largest_greedy_component",
    "alpha_sum",
    "seed",
];
