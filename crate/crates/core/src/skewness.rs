//! Log-skewness and the decomposition of a left-degree-bounded bipartite graph
//! into skew-biregular classes.
//!
//! Round `i` uses the scale `f_i = 2^(2^i)`. It removes, with one exact max
//! flow, enough edges from every left vertex to bring its residual degree down
//! to `floor(16 rho* / f_i^2)`, while no right vertex receives more than
//! `floor(16 rho* (f_i log n)^(2s))` removed edges. The removed edges form
//! class `i`.

use std::fmt;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::flow::FlowNetwork;
use crate::graph::{circulant_offset, degree_stats, BaseGraph, GraphError, Side};
use crate::numeric::{
    log2_n, log2_n_ceil, parse_rational, rational_from_f64, Rational, RationalText,
};
use crate::offline::{max_density_of_graph, OfflineError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SkewError {
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("skew parameter must be at least 1, got {0}")]
    SkewBelowOne(Rational),
    #[error("left degree {max_left} exceeds 4 rho* = {bound}")]
    LeftDegreeBound { max_left: u64, bound: Rational },
    #[error("vertex set B is empty")]
    EmptyB,
    #[error("vertex {0} of A has no edge into B")]
    IsolatedInA(usize),
    #[error("vertex sets must lie on opposite sides")]
    SideMismatch,
    #[error("no feasible decomposition found up to s = {0}")]
    NoFeasibleSkew(u64),
    #[error("decomposition does not match the graph: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Log-skewness value; `Infinite` when the denominator is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewValue {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for SkewValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkewValue::Finite(r) => write!(f, "{:.9}", crate::numeric::to_f64(r)),
            SkewValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkewScore {
    pub value: SkewValue,
    pub a_size: usize,
    pub b_size: usize,
    pub d_a_min: u64,
    pub log_n: f64,
    pub d_av: Rational,
}

/// `log2(|A|/|B|) / log2(d_av log^2 n / d_A_min)`, rounded to `1e-9`.
pub fn log_skewness(
    a_size: usize,
    b_size: usize,
    d_a_min: u64,
    d_av: Rational,
    n: usize,
) -> SkewValue {
    if a_size == b_size {
        return SkewValue::Finite(Rational::zero());
    }
    let log_n = log2_n(n);
    let num = (a_size as f64 / b_size as f64).log2();
    let den = (crate::numeric::to_f64(&d_av) * log_n * log_n / d_a_min as f64).log2();
    if den <= 0.0 {
        return SkewValue::Infinite;
    }
    SkewValue::Finite(rational_from_f64(num / den))
}

/// Log-skewness of the subgraph between `a` and `b`. The larger set plays the
/// role of `A`; `d_av` and `n` come from the whole graph.
pub fn skew_of_subgraph(g: &BaseGraph, a: &[usize], b: &[usize]) -> Result<SkewScore, SkewError> {
    let sides = g.sides().ok_or(SkewError::NotBipartite)?;
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.is_empty() {
        return Err(SkewError::EmptyB);
    }
    let side_a = sides[a[0]];
    if a.iter().any(|&v| sides[v] != side_a) || b.iter().any(|&v| sides[v] == side_a) {
        return Err(SkewError::SideMismatch);
    }
    let mut in_a = vec![false; g.vertex_count()];
    let mut in_b = vec![false; g.vertex_count()];
    a.iter().for_each(|&v| in_a[v] = true);
    b.iter().for_each(|&v| in_b[v] = true);
    let mut deg = vec![0u64; g.vertex_count()];
    for (u, v) in g.edges() {
        if in_a[u] && in_b[v] {
            deg[u] += 1;
        } else if in_a[v] && in_b[u] {
            deg[v] += 1;
        }
    }
    let mut d_a_min = u64::MAX;
    for &v in a {
        if deg[v] == 0 {
            return Err(SkewError::IsolatedInA(v));
        }
        d_a_min = d_a_min.min(deg[v]);
    }
    let d_av = degree_stats(g).avg_degree;
    Ok(SkewScore {
        value: log_skewness(a.len(), b.len(), d_a_min, d_av, g.vertex_count()),
        a_size: a.len(),
        b_size: b.len(),
        d_a_min,
        log_n: log2_n(g.vertex_count()),
        d_av,
    })
}

/// Integer round schedule derived from `rho*`, `s` and `log n`.
#[derive(Debug, Clone)]
struct Schedule {
    /// `16 rho*` as `p/q`.
    p16: BigUint,
    q: BigUint,
    log_n: u32,
    /// `ceil(2 s)`
    exponent: u32,
    /// capacities never need to exceed this
    clamp: u64,
}

impl Schedule {
    fn new(rho: Rational, s: Rational, log_n: u32, clamp: u64) -> Self {
        let two_s = s * 2;
        Schedule {
            p16: BigUint::from(*rho.numer() as u64) * 16u32,
            q: BigUint::from(*rho.denom() as u64),
            log_n,
            exponent: two_s.ceil().to_integer() as u32,
            clamp,
        }
    }

    fn f(i: usize) -> BigUint {
        BigUint::one() << (1usize << i)
    }

    /// `floor(16 rho* / f_i)`
    fn left_cap(&self, i: usize) -> u64 {
        let v = &self.p16 / (&self.q * Self::f(i));
        v.to_u64().unwrap_or(u64::MAX)
    }

    /// `floor(16 rho* / f_i^2)`, the residual left degree after round `i`.
    fn keep(&self, i: usize) -> u64 {
        self.left_cap(i + 1)
    }

    /// `floor(16 rho* (f_i log n)^(2s))`, clamped.
    fn right_cap(&self, i: usize) -> u64 {
        let base = Self::f(i) * self.log_n;
        // avoid building astronomically large powers: stop once past the clamp
        let limit = BigUint::from(self.clamp) * &self.q;
        let mut pow = BigUint::one();
        for _ in 0..self.exponent {
            pow *= &base;
            if &self.p16 * &pow >= limit {
                return self.clamp;
            }
        }
        (&self.p16 * pow / &self.q)
            .to_u64()
            .unwrap_or(u64::MAX)
            .min(self.clamp)
    }

    fn continues_after(&self, i: usize) -> bool {
        self.left_cap(i + 1) >= 1
    }
}

/// Class labels of the edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassMap {
    /// 1-based class of every edge.
    PerEdge(Vec<u8>),
    /// Split complete graph: class `i` holds the edges whose tail-to-head
    /// offset lies in `(upper[i], upper[i-1]]`, `upper[0] = n`.
    ByOffset { base_n: usize, upper: Vec<u64> },
}

/// Degree certificate of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCertificate {
    pub max_left: u64,
    pub left_cap: u64,
    pub max_right: u64,
    pub right_cap: u64,
    /// Max left degree of the residual after this round.
    pub residual_left: u64,
    pub residual_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub classes: ClassMap,
    pub h: usize,
    pub skew_param: Rational,
    pub rho_star: Rational,
    pub log_n: u32,
    pub certificates: Vec<ClassCertificate>,
    /// Edges appended to class `h` after the last round.
    pub flushed_edges: usize,
}

impl Decomposition {
    /// 1-based class of edge `e`.
    #[inline]
    pub fn class_of(&self, g: &BaseGraph, e: usize) -> usize {
        match &self.classes {
            ClassMap::PerEdge(c) => c[e] as usize,
            ClassMap::ByOffset { base_n, upper } => {
                let (head, tail) = g.edge(e);
                let off = circulant_offset(*base_n, head, tail - base_n) as u64;
                offset_class(upper, off)
            }
        }
    }

    /// Edge count per class (index 0 is class 1).
    pub fn class_sizes(&self, g: &BaseGraph) -> Vec<usize> {
        let mut sizes = vec![0usize; self.h];
        match &self.classes {
            ClassMap::PerEdge(c) => {
                for &k in c {
                    sizes[k as usize - 1] += 1;
                }
            }
            ClassMap::ByOffset { base_n, upper } => {
                let n = *base_n;
                for off in 1..=(n / 2) as u64 {
                    let per_offset = if 2 * off as usize == n { n / 2 } else { n };
                    sizes[offset_class(upper, off) - 1] += per_offset;
                }
                debug_assert_eq!(sizes.iter().sum::<usize>(), g.edge_count());
            }
        }
        sizes
    }

    /// `h s rho_num rho_den`, then `edge_index class` per edge.
    pub fn write_to<W: Write>(&self, g: &BaseGraph, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{} {} {} {}",
            self.h,
            RationalText(&self.skew_param),
            self.rho_star.numer(),
            self.rho_star.denom()
        )?;
        for e in 0..g.edge_count() {
            writeln!(w, "{e} {}", self.class_of(g, e))?;
        }
        Ok(())
    }

    /// Parses the text form and recomputes the certificates against `g`.
    pub fn parse(g: &BaseGraph, text: &str) -> Result<Self, SkewError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, msg: &str| {
            SkewError::Graph(GraphError::Malformed {
                line,
                msg: msg.into(),
            })
        };
        let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad(hl, "expected `h s rho_num rho_den`"));
        }
        let h: usize = f[0].parse().map_err(|_| bad(hl, "bad h"))?;
        let s = parse_rational(f[1]).map_err(|_| bad(hl, "bad s"))?;
        let rn: i64 = f[2].parse().map_err(|_| bad(hl, "bad rho_num"))?;
        let rd: i64 = f[3].parse().map_err(|_| bad(hl, "bad rho_den"))?;
        if rd <= 0 || h == 0 || h > u8::MAX as usize {
            return Err(bad(hl, "header out of range"));
        }
        let mut class = vec![0u8; g.edge_count()];
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let (Some(e), Some(c), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad(line, "expected `edge_index class`"));
            };
            let e: usize = e.parse().map_err(|_| bad(line, "bad edge index"))?;
            let c: usize = c.parse().map_err(|_| bad(line, "bad class"))?;
            if e >= class.len() || c == 0 || c > h || class[e] != 0 {
                return Err(bad(line, "edge index or class out of range, or repeated"));
            }
            class[e] = c as u8;
        }
        if class.contains(&0) {
            return Err(SkewError::Mismatch("some edges have no class".into()));
        }
        let rho = Rational::new(rn, rd);
        let schedule = Schedule::new(rho, s, log2_n_ceil(g.vertex_count()), g.edge_count() as u64);
        let classes = ClassMap::PerEdge(class);
        let certificates = certify(g, &classes, h, &schedule);
        Ok(Decomposition {
            classes,
            h,
            skew_param: s,
            rho_star: rho,
            log_n: schedule.log_n,
            certificates,
            flushed_edges: 0,
        })
    }
}

fn offset_class(upper: &[u64], off: u64) -> usize {
    // upper[0] >= every offset
    (1..upper.len())
        .find(|&i| off > upper[i])
        .unwrap_or(upper.len() - 1)
}

/// Checks the decomposition preconditions and returns `(rho*, Δ_L)`.
fn check_input(g: &BaseGraph, s: Rational) -> Result<Rational, SkewError> {
    if !g.is_bipartite() {
        return Err(SkewError::NotBipartite);
    }
    if s < Rational::one() {
        return Err(SkewError::SkewBelowOne(s));
    }
    let rho = max_density_of_graph(g)?.value;
    let max_left = degree_stats(g).max_left_degree;
    if Rational::from_integer(max_left as i64) > rho * 4 {
        return Err(SkewError::LeftDegreeBound {
            max_left,
            bound: rho * 4,
        });
    }
    Ok(rho)
}

/// Decomposes `g` with skew parameter `s`. `Ok(None)` when some round's flow
/// cannot saturate the left excess.
pub fn decompose(g: &BaseGraph, s: Rational) -> Result<Option<Decomposition>, SkewError> {
    let rho = check_input(g, s)?;
    Ok(decompose_with_rho(g, s, rho))
}

fn decompose_with_rho(g: &BaseGraph, s: Rational, rho: Rational) -> Option<Decomposition> {
    let schedule = Schedule::new(rho, s, log2_n_ceil(g.vertex_count()), g.edge_count() as u64);
    if let Some(base_n) = g
        .implicit_complete_order()
        .filter(|_| g.is_oriented_complete())
    {
        return Some(decompose_split_complete(g, base_n, s, rho, schedule));
    }
    let edges = g.explicit_edges().expect("explicit");
    let n = g.vertex_count();
    let m = edges.len();
    let mut class = vec![0u8; m];
    let mut res_deg = vec![0u64; n];
    for &(u, _) in edges {
        res_deg[u as usize] += 1;
    }
    // residual adjacency of left vertices, compacted as edges leave
    let mut left_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (e, &(u, _)) in edges.iter().enumerate() {
        left_edges[u as usize].push(e as u32);
    }

    let mut h = 0usize;
    let mut remaining = m;
    loop {
        let i = h + 1;
        let keep = schedule.keep(i);
        let right_cap = schedule.right_cap(i);

        let excess: Vec<(usize, u64)> = (0..n)
            .filter(|&u| res_deg[u] > keep)
            .map(|u| (u, res_deg[u] - keep))
            .collect();
        if excess.is_empty() {
            // nothing to remove: the whole residual becomes this class
            h = i;
            break;
        }
        {
            // nodes: left vertices with excess, touched right vertices, s, t
            let mut node_of = vec![u32::MAX; n];
            let mut next = 0u32;
            for &(u, _) in &excess {
                node_of[u] = next;
                next += 1;
            }
            for &(u, _) in &excess {
                for &e in &left_edges[u] {
                    let v = edges[e as usize].1 as usize;
                    if node_of[v] == u32::MAX {
                        node_of[v] = next;
                        next += 1;
                    }
                }
            }
            let nodes = next as usize;
            let (src, sink) = (nodes, nodes + 1);
            let mut net = FlowNetwork::new(nodes + 2);
            let mut need = 0i64;
            let mut arcs = Vec::new();
            for &(u, x) in &excess {
                net.add_arc(src, node_of[u] as usize, x as i64);
                need += x as i64;
                for &e in &left_edges[u] {
                    let v = edges[e as usize].1 as usize;
                    let id = net.add_arc(node_of[u] as usize, node_of[v] as usize, 1);
                    arcs.push((e, id));
                }
            }
            let mut right_seen = vec![false; nodes];
            for &(u, _) in &excess {
                for &e in &left_edges[u] {
                    let v = node_of[edges[e as usize].1 as usize] as usize;
                    if !right_seen[v] {
                        right_seen[v] = true;
                        net.add_arc(v, sink, right_cap as i64);
                    }
                }
            }
            if net.max_flow(src, sink) < need {
                return None;
            }
            for (e, id) in arcs {
                if net.flow_on(id) == 1 {
                    class[e as usize] = i as u8;
                    let u = edges[e as usize].0 as usize;
                    res_deg[u] -= 1;
                    remaining -= 1;
                }
            }
            for &(u, _) in &excess {
                left_edges[u].retain(|&e| class[e as usize] == 0);
            }
        }
        h = i;
        if remaining == 0 || !schedule.continues_after(i) {
            break;
        }
    }
    let flushed = remaining;
    for c in class.iter_mut().filter(|c| **c == 0) {
        *c = h as u8;
    }
    let classes = ClassMap::PerEdge(class);
    let certificates = certify(g, &classes, h, &schedule);
    Some(Decomposition {
        classes,
        h,
        skew_param: s,
        rho_star: rho,
        log_n: schedule.log_n,
        certificates,
        flushed_edges: flushed,
    })
}

/// The same rounds on the split complete graph, where every vertex sees each
/// offset once: removing the largest offsets first is a saturating flow, since
/// each class is regular with degree at most its left cap.
fn decompose_split_complete(
    g: &BaseGraph,
    base_n: usize,
    s: Rational,
    rho: Rational,
    schedule: Schedule,
) -> Decomposition {
    let max_off = (base_n / 2) as u64;
    let mut upper = vec![max_off];
    loop {
        let i = upper.len();
        let cur = *upper.last().unwrap();
        let keep = schedule.keep(i).min(cur);
        upper.push(keep);
        if keep == cur || keep == 0 || !schedule.continues_after(i) {
            break;
        }
    }
    let h = upper.len() - 1;
    // flush: whatever is left joins class h
    *upper.last_mut().unwrap() = 0;
    let classes = ClassMap::ByOffset { base_n, upper };
    let certificates = certify(g, &classes, h, &schedule);
    Decomposition {
        classes,
        h,
        skew_param: s,
        rho_star: rho,
        log_n: schedule.log_n,
        certificates,
        flushed_edges: 0,
    }
}

/// Per-class and per-residual degree maxima plus the caps they must respect.
fn certify(
    g: &BaseGraph,
    classes: &ClassMap,
    h: usize,
    schedule: &Schedule,
) -> Vec<ClassCertificate> {
    let (left, right) = class_degrees(g, classes, h);
    let n = g.vertex_count();
    let sides = g.sides().expect("bipartite");
    (1..=h)
        .map(|i| {
            let mut max_left = 0;
            let mut max_right = 0;
            let mut residual_left = 0;
            for v in 0..n {
                let d = left[v * h + i - 1];
                match sides[v] {
                    Side::Left => {
                        max_left = max_left.max(d);
                        let res: u64 = (i..h).map(|j| left[v * h + j]).sum();
                        residual_left = residual_left.max(res);
                    }
                    Side::Right => max_right = max_right.max(right[v * h + i - 1]),
                }
            }
            ClassCertificate {
                max_left,
                left_cap: schedule.left_cap(i),
                max_right,
                right_cap: schedule.right_cap(i),
                residual_left,
                residual_cap: schedule.keep(i),
            }
        })
        .collect()
}

/// Per-vertex per-class degrees, indexed `v * h + (class - 1)`; left degrees
/// in the first vector, right in the second.
fn class_degrees(g: &BaseGraph, classes: &ClassMap, h: usize) -> (Vec<u64>, Vec<u64>) {
    let n = g.vertex_count();
    let mut left = vec![0u64; n * h];
    let mut right = vec![0u64; n * h];
    match classes {
        ClassMap::PerEdge(c) => {
            for (e, (u, v)) in g.edges().enumerate() {
                let k = c[e] as usize - 1;
                left[u * h + k] += 1;
                right[v * h + k] += 1;
            }
        }
        ClassMap::ByOffset { base_n, upper } => {
            let bn = *base_n;
            // per class: number of offsets, and whether it holds the diameter
            let mut count = vec![0u64; h];
            let mut diameter = vec![false; h];
            for k in 0..h {
                let lo = if k + 1 == h { 0 } else { upper[k + 1] };
                count[k] = upper[k] - lo;
                diameter[k] = bn % 2 == 0 && lo < (bn / 2) as u64 && (bn / 2) as u64 <= upper[k];
            }
            for w in 0..bn {
                for k in 0..h {
                    // a diameter points into the upper half
                    let d = u64::from(diameter[k]);
                    left[w * h + k] = count[k] - if w < bn / 2 { d } else { 0 };
                    right[(bn + w) * h + k] = count[k] - if w >= bn / 2 { d } else { 0 };
                }
            }
        }
    }
    (left, right)
}

/// Smallest `s` in `1, 2, 4, ...` for which [`decompose`] succeeds, together
/// with that decomposition.
pub fn estimate_skew(g: &BaseGraph) -> Result<(Rational, Decomposition), SkewError> {
    let rho = check_input(g, Rational::one())?;
    let max_right = degree_stats(g).max_right_degree;
    let mut s = 1u64;
    loop {
        let sr = Rational::from_integer(s as i64);
        if let Some(d) = decompose_with_rho(g, sr, rho) {
            return Ok((sr, d));
        }
        // once every right cap covers the largest right degree the flow
        // always saturates, so failing here means something is wrong
        let schedule = Schedule::new(
            rho,
            sr,
            log2_n_ceil(g.vertex_count()),
            g.edge_count() as u64,
        );
        if schedule.right_cap(1) >= max_right || s >= 1 << 20 {
            return Err(SkewError::NoFeasibleSkew(s));
        }
        s *= 2;
    }
}

/// Outcome of recomputing every decomposition invariant from scratch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub classes: Vec<ClassCheck>,
    pub partition_ok: bool,
    pub rounds_ok: bool,
    pub h_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCheck {
    pub class: usize,
    pub certificate: ClassCertificate,
    pub pass: bool,
    /// First vertex breaking a bound.
    pub violator: Option<usize>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.partition_ok && self.rounds_ok && self.classes.iter().all(|c| c.pass)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.classes {
            let k = &c.certificate;
            write!(
                f,
                "class {}: dL={} cap={} dR={} cap={} {}",
                c.class,
                k.max_left,
                k.left_cap,
                k.max_right,
                k.right_cap,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
            if let Some(v) = c.violator {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "partition: {}",
            if self.partition_ok { "PASS" } else { "FAIL" }
        )?;
        write!(
            f,
            "rounds: h={} bound={} {}",
            self.classes.len(),
            self.h_bound,
            if self.rounds_ok { "PASS" } else { "FAIL" }
        )
    }
}

/// `ceil(log2 log2(16 rho*)) + 1`
pub fn round_bound(rho: Rational) -> usize {
    let x = crate::numeric::to_f64(&(rho * 16));
    let ll = x.log2().log2();
    // 16 rho* >= 8, so ll > 1.5
    (ll - 1e-12).ceil() as usize + 1
}

/// Recomputes every invariant of `d` against `g`: partition exactness,
/// per-class degree caps, residual caps, and the round bound.
pub fn verify_decomposition(g: &BaseGraph, d: &Decomposition) -> Result<VerifyReport, SkewError> {
    if !g.is_bipartite() {
        return Err(SkewError::NotBipartite);
    }
    let rho = max_density_of_graph(g)?.value;
    let schedule = Schedule::new(
        rho,
        d.skew_param,
        log2_n_ceil(g.vertex_count()),
        g.edge_count() as u64,
    );
    let h = d.h;
    let partition_ok = match &d.classes {
        ClassMap::PerEdge(c) => {
            c.len() == g.edge_count() && c.iter().all(|&k| k >= 1 && k as usize <= h)
        }
        ClassMap::ByOffset { base_n, upper } => {
            Some(*base_n) == g.implicit_complete_order()
                && upper.len() == h + 1
                && upper.windows(2).all(|w| w[0] >= w[1])
        }
    } && d.class_sizes(g).iter().sum::<usize>() == g.edge_count();
    if !partition_ok {
        return Ok(VerifyReport {
            classes: Vec::new(),
            partition_ok,
            rounds_ok: false,
            h_bound: round_bound(rho),
        });
    }

    let (left, right) = class_degrees(g, &d.classes, h);
    let sides = g.sides().unwrap();
    let certificates = certify(g, &d.classes, h, &schedule);
    let classes = certificates
        .into_iter()
        .enumerate()
        .map(|(k, cert)| {
            let i = k + 1;
            let violator = (0..g.vertex_count()).find(|&v| match sides[v] {
                Side::Left => {
                    let res: u64 = (i..h).map(|j| left[v * h + j]).sum();
                    left[v * h + k] > cert.left_cap || res > cert.residual_cap
                }
                Side::Right => right[v * h + k] > cert.right_cap,
            });
            ClassCheck {
                class: i,
                pass: violator.is_none(),
                violator,
                certificate: cert,
            }
        })
        .collect();
    let h_bound = round_bound(rho);
    Ok(VerifyReport {
        classes,
        partition_ok,
        rounds_ok: h <= h_bound,
        h_bound,
    })
}
