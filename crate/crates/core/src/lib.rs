//! Online graph balancing under i.i.d. edge arrivals.
//!
//! A known base graph `G` is sampled `T` times uniformly with replacement and
//! every arriving edge must be oriented on arrival; the goal is a small
//! maximum in-degree. This crate provides
//!
//! * exact offline optima (max-density via max flow, optimal orientations),
//! * log-skewness scoring and the decomposition of a left-degree-bounded
//!   bipartite graph into skew-biregular classes,
//! * Greedy, Threshold-Greedy and left-assign online algorithms plus the
//!   regime router for general `T`,
//! * generators for every instance family used in the experiments, and
//! * a seeded, parallel Monte Carlo harness with CSV reports.

pub mod flow;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod numeric;
pub mod offline;
pub mod online;
pub mod skewness;

pub use graph::{
    child_seed, components, degree_stats, load_graph, sample_iid, BaseGraph, GraphError,
    GraphFormat, GraphStats, Multigraph, SampledStream, Side,
};
pub use numeric::Rational;
pub use offline::{
    bipartize, lower_bounds, max_density, offline_opt, optimal_orientation, peel_approx,
    Bipartization, DensityCertificate, LowerBounds, OfflineError, Orientation,
};

pub use generators::{
    gen_biregular_imbalanced, gen_complete, gen_complete_bipartite, gen_layered_lb, gen_regular,
    GenError, LayeredLBParams,
};
pub use harness::{
    diagnostic_greedy_components, read_csv, run_experiment, summarize, summarize_rows, write_csv,
    Algo, AlgoResult, AlgoSummary, CsvRow, Diagnostics, ExperimentConfig, ExperimentOutput,
    GraphSpec, HarnessError, SetupInfo, Summary, TMode, TrialReport,
};
pub use online::{
    augment_cliques, augment_isolated, augmented_graph, left_cap_exceeded, make_thresholds,
    run_greedy, run_left_assign, run_threshold_greedy, select_regime, select_regime_with_budget,
    Assignment, LoadState, OnlineError, PlannedAlgorithm, RegimeCase, RegimePlan, Rule,
    ThresholdVector, TieBreak,
};
pub use skewness::{
    decompose, estimate_skew, log_skewness, skew_of_subgraph, verify_decomposition, ClassMap,
    Decomposition, SkewError, SkewScore, SkewValue, VerifyReport,
};
