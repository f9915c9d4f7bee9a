//! Online assignment: Greedy, Threshold-Greedy, left-assign, and the router
//! that picks one of them from the number of arrivals.

use std::fmt;
use std::io::Write;

use rand::Rng;

use crate::graph::{degree_stats, rng_from_seed, BaseGraph, GraphError, SampledStream, Side};
use crate::numeric::{log2_log2_n, log2_n, to_f64, Rational};
use crate::skewness::Decomposition;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OnlineError {
    #[error("left-assign needs a bipartite graph")]
    NotBipartite,
    #[error("decomposition has {have} classes but the thresholds cover {want}")]
    ClassMismatch { have: usize, want: usize },
    #[error("edge {0} has no class")]
    MissingClass(usize),
    #[error("augmented graph would have {0} edges, over the budget")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which rule assigned an arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Threshold rule of the given 1-based class.
    Threshold(u8),
    Greedy,
    Left,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Threshold(i) => write!(f, "T{i}"),
            Rule::Greedy => write!(f, "G"),
            Rule::Left => write!(f, "L"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub edge: u32,
    pub head: u32,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadState {
    /// `L(u)`
    pub total_load: Vec<u64>,
    /// `ℓ_i(u)` at `u * classes + (i - 1)`; empty unless Threshold-Greedy ran.
    pub class_load: Vec<u32>,
    pub classes: usize,
    /// `ℓ_g(w)`
    pub greedy_load: Vec<u64>,
    /// Edge indices of greedy-rule arrivals, in arrival order.
    pub greedy_edges: Vec<usize>,
    pub assignment: Vec<Assignment>,
    /// Steps at which some `ℓ_i(u)` exceeded `α_i`.
    pub cap_violations: u64,
}

impl LoadState {
    fn new(n: usize, classes: usize, arrivals: usize) -> Self {
        LoadState {
            total_load: vec![0; n],
            class_load: vec![0; n * classes],
            classes,
            greedy_load: vec![0; n],
            greedy_edges: Vec::new(),
            assignment: Vec::with_capacity(arrivals),
            cap_violations: 0,
        }
    }

    pub fn max_load(&self) -> u64 {
        self.total_load.iter().copied().max().unwrap_or(0)
    }

    pub fn max_greedy_load(&self) -> u64 {
        self.greedy_load.iter().copied().max().unwrap_or(0)
    }

    pub fn arrivals(&self) -> usize {
        self.assignment.len()
    }

    /// Arrivals taken by each threshold class (index 0 is class 1).
    pub fn threshold_usage(&self) -> Vec<u64> {
        let mut usage = vec![0u64; self.classes];
        for a in &self.assignment {
            if let Rule::Threshold(i) = a.rule {
                usage[i as usize - 1] += 1;
            }
        }
        usage
    }

    /// `t edge_index head rule` per arrival.
    pub fn write_trace<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (t, a) in self.assignment.iter().enumerate() {
            writeln!(w, "{t} {} {} {}", a.edge, a.head, a.rule)?;
        }
        Ok(())
    }

    fn assign(&mut self, edge: usize, head: usize, rule: Rule) {
        self.total_load[head] += 1;
        if rule == Rule::Greedy {
            self.greedy_load[head] += 1;
            self.greedy_edges.push(edge);
        }
        self.assignment.push(Assignment {
            edge: edge as u32,
            head: head as u32,
            rule,
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Random(u64),
    /// First endpoint of the edge (the Left one in a bipartite graph).
    PreferLeft,
}

/// Each arrival goes to the endpoint with the smaller total load.
pub fn run_greedy(g: &BaseGraph, stream: &SampledStream, tie: TieBreak) -> LoadState {
    let mut st = LoadState::new(g.vertex_count(), 0, stream.len());
    let mut rng = match tie {
        TieBreak::Random(seed) => Some(rng_from_seed(seed)),
        TieBreak::PreferLeft => None,
    };
    for &e in &stream.arrivals {
        let (u, v) = g.edge(e);
        let (lu, lv) = (st.total_load[u], st.total_load[v]);
        let head = if lu < lv {
            u
        } else if lv < lu {
            v
        } else {
            match rng.as_mut() {
                Some(r) => {
                    if r.gen_bool(0.5) {
                        v
                    } else {
                        u
                    }
                }
                None => u,
            }
        };
        st.assign(e, head, Rule::Greedy);
    }
    st
}

/// Per-class thresholds `α_i = ⌈c (ρ*/d_av + s)((log log n)/2^i + 1)⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector {
    pub alpha: Vec<u64>,
    pub c: Rational,
    pub rho_star: Rational,
    pub d_av: Rational,
    pub s: Rational,
    pub log_log_n: f64,
}

impl ThresholdVector {
    pub fn alpha_sum(&self) -> u64 {
        self.alpha.iter().sum()
    }

    /// `α_i` for 1-based `i`.
    pub fn get(&self, i: usize) -> u64 {
        self.alpha[i - 1]
    }
}

/// Thresholds for classes `1..=h`. `s` below 1 is raised to 1.
pub fn make_thresholds(
    rho_star: Rational,
    d_av: Rational,
    s: Rational,
    n: usize,
    c: Rational,
    h: usize,
) -> ThresholdVector {
    let s = s.max(Rational::from_integer(1));
    let ll = log2_log2_n(n);
    let base = to_f64(&c) * (to_f64(&rho_star) / to_f64(&d_av) + to_f64(&s));
    let alpha = (1..=h)
        .map(|i| {
            let x = base * (ll / (1u64 << i.min(63)) as f64 + 1.0);
            crate::numeric::ceil_snapped(x).max(0) as u64
        })
        .collect();
    ThresholdVector {
        alpha,
        c,
        rho_star,
        d_av,
        s,
        log_log_n: ll,
    }
}

/// Threshold-Greedy. A class-`i` arrival `(u, v)` goes to its left endpoint
/// `u` while `ℓ_i(u) < α_i`; otherwise to `u` if `ℓ_g(u) < ℓ_g(v)`, else `v`.
pub fn run_threshold_greedy(
    g: &BaseGraph,
    d: &Decomposition,
    alpha: &ThresholdVector,
    stream: &SampledStream,
) -> Result<LoadState, OnlineError> {
    if !g.is_bipartite() {
        return Err(OnlineError::NotBipartite);
    }
    if alpha.alpha.len() < d.h {
        return Err(OnlineError::ClassMismatch {
            have: d.h,
            want: alpha.alpha.len(),
        });
    }
    let h = d.h;
    let mut st = LoadState::new(g.vertex_count(), h, stream.len());
    for &e in &stream.arrivals {
        if e >= g.edge_count() {
            return Err(OnlineError::MissingClass(e));
        }
        let (u, v) = g.edge(e);
        let i = d.class_of(g, e);
        if i == 0 || i > h {
            return Err(OnlineError::MissingClass(e));
        }
        let slot = u * h + i - 1;
        let cap = alpha.alpha[i - 1];
        if (st.class_load[slot] as u64) < cap {
            st.class_load[slot] += 1;
            st.assign(e, u, Rule::Threshold(i as u8));
            if st.class_load[slot] as u64 > cap {
                st.cap_violations += 1;
            }
        } else {
            let head = if st.greedy_load[u] < st.greedy_load[v] {
                u
            } else {
                v
            };
            st.assign(e, head, Rule::Greedy);
        }
    }
    Ok(st)
}

/// Every arrival goes to its Left endpoint.
pub fn run_left_assign(g: &BaseGraph, stream: &SampledStream) -> Result<LoadState, OnlineError> {
    let sides = g.sides().ok_or(OnlineError::NotBipartite)?;
    let mut st = LoadState::new(g.vertex_count(), 0, stream.len());
    for &e in &stream.arrivals {
        let (u, v) = g.edge(e);
        let head = if sides[u] == Side::Left { u } else { v };
        st.assign(e, head, Rule::Left);
    }
    Ok(st)
}

/// Arrival regime, split at `log n`, `n` and `n log n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeCase {
    /// `T > n log n`
    Heavy,
    /// `n ≤ T ≤ n log n`
    Linear,
    /// `log n < T < n`
    Sparse,
    /// `T ≤ log n`
    Tiny,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannedAlgorithm {
    LeftAssign,
    /// Threshold-Greedy prepared on the augmented graph when there is one;
    /// arrivals always index the original edges, which form a prefix of it.
    ThresholdGreedy,
    Greedy,
}

#[derive(Debug, Clone)]
pub struct RegimePlan {
    pub case: RegimeCase,
    pub algorithm: PlannedAlgorithm,
    pub augmented: Option<BaseGraph>,
    /// `T / n`
    pub gamma: Rational,
    pub isolated_added: u64,
    pub num_cliques: u64,
    pub clique_size: Option<u64>,
    /// Left degree above `log n · d_av`: left-assign takes over.
    pub left_cap_exceeded: bool,
}

/// Whether `Δ_L > log n · d_av` in a bipartite graph.
pub fn left_cap_exceeded(g: &BaseGraph) -> bool {
    if !g.is_bipartite() || g.is_empty() {
        return false;
    }
    let st = degree_stats(g);
    st.max_left_degree as f64 > log2_n(g.vertex_count()) * to_f64(&st.avg_degree)
}

pub fn regime_case(n: usize, t: u64) -> RegimeCase {
    let log_n = log2_n(n);
    let (tf, nf) = (t as f64, n as f64);
    if tf > nf * log_n {
        RegimeCase::Heavy
    } else if t as usize >= n {
        RegimeCase::Linear
    } else if tf > log_n {
        RegimeCase::Sparse
    } else {
        RegimeCase::Tiny
    }
}

/// Plans the algorithm for `t` arrivals on `g` without building any graph.
pub fn select_regime(g: &BaseGraph, t: u64) -> RegimePlan {
    plan(g, t, None).expect("no budget, no error")
}

/// Like [`select_regime`], and builds the augmented graph when its edge
/// count stays within `edge_budget`.
pub fn select_regime_with_budget(
    g: &BaseGraph,
    t: u64,
    edge_budget: u64,
) -> Result<RegimePlan, OnlineError> {
    plan(g, t, Some(edge_budget))
}

fn plan(g: &BaseGraph, t: u64, budget: Option<u64>) -> Result<RegimePlan, OnlineError> {
    let n = g.vertex_count();
    let log_n = log2_n(n);
    let d_av = degree_stats(g).avg_degree;
    let d_avf = to_f64(&d_av);
    let case = regime_case(n, t);
    let mut p = RegimePlan {
        case,
        algorithm: PlannedAlgorithm::LeftAssign,
        augmented: None,
        gamma: Rational::new(t as i64, n as i64),
        isolated_added: 0,
        num_cliques: 0,
        clique_size: None,
        left_cap_exceeded: left_cap_exceeded(g),
    };
    match case {
        RegimeCase::Heavy => {}
        RegimeCase::Tiny => p.algorithm = PlannedAlgorithm::Greedy,
        RegimeCase::Linear => {
            if d_avf > log_n && !p.left_cap_exceeded {
                p.algorithm = PlannedAlgorithm::ThresholdGreedy;
                p.isolated_added = t - n as u64;
            }
        }
        RegimeCase::Sparse => {
            let gamma = t as f64 / n as f64;
            if d_avf / gamma > log_n && !p.left_cap_exceeded {
                p.algorithm = PlannedAlgorithm::ThresholdGreedy;
                // k = ⌈d_av / γ⌉ = ⌈d_av n / T⌉, cliques = ⌈n / d_av⌉, in exact arithmetic
                let k = (d_av * Rational::from_integer(n as i64) / Rational::from_integer(t as i64))
                    .ceil()
                    .to_integer() as u64;
                let cliques = (Rational::from_integer(n as i64) / d_av)
                    .ceil()
                    .to_integer() as u64;
                p.clique_size = Some(k);
                p.num_cliques = cliques;
            }
        }
    }
    if let Some(b) = budget {
        p.augmented = augmented_graph(g, &p, b)?;
    }
    Ok(p)
}

/// Builds the augmented graph a plan asks for, if any, refusing to exceed
/// `edge_budget` edges.
pub fn augmented_graph(
    g: &BaseGraph,
    plan: &RegimePlan,
    edge_budget: u64,
) -> Result<Option<BaseGraph>, OnlineError> {
    if plan.algorithm != PlannedAlgorithm::ThresholdGreedy {
        return Ok(None);
    }
    if let Some(k) = plan.clique_size {
        let extra = plan
            .num_cliques
            .saturating_mul(k.saturating_mul(k.saturating_sub(1)) / 2);
        check_budget((g.edge_count() as u64).saturating_add(extra), edge_budget)?;
        return Ok(Some(augment_cliques(
            g,
            plan.num_cliques as usize,
            k as usize,
        )));
    }
    if plan.isolated_added > 0 {
        check_budget(g.edge_count() as u64, edge_budget)?;
        return Ok(Some(augment_isolated(g, plan.isolated_added as usize)));
    }
    Ok(None)
}

fn check_budget(edges: u64, budget: u64) -> Result<(), OnlineError> {
    if edges > budget {
        Err(OnlineError::BudgetExceeded(edges))
    } else {
        Ok(())
    }
}

/// `g` plus `count` isolated vertices; edges and their indices unchanged.
pub fn augment_isolated(g: &BaseGraph, count: usize) -> BaseGraph {
    if count == 0 {
        return g.clone();
    }
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    match g.sides() {
        Some(sides) => {
            let mut sides = sides.to_vec();
            sides.extend(std::iter::repeat_n(Side::Right, count));
            BaseGraph::with_sides(sides, edges).expect("valid")
        }
        None => BaseGraph::new(n + count, edges).expect("valid"),
    }
}

/// `g` plus `num_cliques` disjoint copies of `K_k` on new vertices; the
/// original edges keep their indices and the clique edges follow.
pub fn augment_cliques(g: &BaseGraph, num_cliques: usize, k: usize) -> BaseGraph {
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for c in 0..num_cliques {
        let base = n + c * k;
        for a in 0..k {
            for b in a + 1..k {
                edges.push((base + a, base + b));
            }
        }
    }
    BaseGraph::new(n + num_cliques * k, edges).expect("valid")
}
