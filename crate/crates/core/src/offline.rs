//! Offline optimum: max-density, optimal orientation, the peeling
//! 2-approximation, bipartization and the analytic lower bounds on the
//! expected optimum.
//!
//! The optimal offline max load of a multigraph `H` is `ceil(rho*(H))`, where
//! `rho*` is the largest edges-per-vertex ratio over induced subgraphs.

use std::io::Write;

use num_traits::{ToPrimitive, Zero};

use crate::flow::{Cap, FlowNetwork};
use crate::graph::{degree_stats, BaseGraph, GraphError, Multigraph, SampledStream, Side};
use crate::numeric::{ceil_u64, log2_n, Rational, RationalText};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OfflineError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-edge head choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub heads: Vec<u32>,
    pub max_in_degree: u64,
}

impl Orientation {
    fn from_heads(n: usize, heads: Vec<u32>) -> Self {
        let mut indeg = vec![0u64; n];
        for &h in &heads {
            indeg[h as usize] += 1;
        }
        Orientation {
            max_in_degree: indeg.into_iter().max().unwrap_or(0),
            heads,
        }
    }

    /// One line per edge: `edge_index head_vertex`.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (e, h) in self.heads.iter().enumerate() {
            writeln!(w, "{e} {h}")?;
        }
        Ok(())
    }
}

/// `rho*` with a vertex set attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityCertificate {
    pub value: Rational,
    pub witness: Vec<usize>,
}

impl DensityCertificate {
    /// `rho_num rho_den`, then the witness vertices on one line.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.value.numer(), self.value.denom())?;
        let vs: Vec<String> = self.witness.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", vs.join(" "))
    }
}

/// Vertices of `h` that carry at least one edge, and `h` relabelled onto them.
fn compact(h: &Multigraph) -> (Vec<usize>, Vec<(usize, usize, Cap)>) {
    let mut id = vec![usize::MAX; h.vertex_count];
    let mut active = Vec::new();
    let mut pairs = Vec::with_capacity(h.pairs.len());
    for &(u, v, c) in &h.pairs {
        for w in [u as usize, v as usize] {
            if id[w] == usize::MAX {
                id[w] = active.len();
                active.push(w);
            }
        }
        pairs.push((id[u as usize], id[v as usize], c as Cap));
    }
    (active, pairs)
}

/// Exact maximum density.
///
/// Parametric search over achieved densities: for the current candidate
/// `g = p/q` a single min cut in Goldberg's network finds the set maximizing
/// `q|E(S)| - p|S|`; a positive optimum yields a strictly denser set whose
/// density becomes the next candidate. Every candidate is the density of an
/// actual vertex set, so the search ends on `rho*` exactly.
pub fn max_density(h: &Multigraph) -> Result<DensityCertificate, OfflineError> {
    let m = h.edge_total();
    if m == 0 {
        return Err(OfflineError::EmptyGraph);
    }
    let (active, pairs) = compact(h);
    let n = active.len();
    let mut deg = vec![0 as Cap; n];
    for &(u, v, c) in &pairs {
        deg[u] += c;
        deg[v] += c;
    }
    let m = m as Cap;

    let mut best = Rational::new(m, n as i64);
    let mut witness: Vec<usize> = (0..n).collect();
    loop {
        let (p, q) = (*best.numer(), *best.denom());
        let (src, sink) = (n, n + 1);
        let mut net = FlowNetwork::with_capacity(n + 2, 2 * pairs.len() + 2 * n);
        for (v, &dv) in deg.iter().enumerate() {
            net.add_arc(src, v, q * m);
            net.add_arc(v, sink, q * m + 2 * p - q * dv);
        }
        for &(u, v, c) in &pairs {
            net.add_arc(u, v, q * c);
            net.add_arc(v, u, q * c);
        }
        net.max_flow(src, sink);
        let side = net.source_side(src);
        let set: Vec<usize> = (0..n).filter(|&v| side[v]).collect();
        if set.is_empty() {
            break;
        }
        let inside = induced_count(&pairs, &side);
        let cand = Rational::new(inside, set.len() as i64);
        if cand <= best {
            break;
        }
        best = cand;
        witness = set;
    }
    let mut witness: Vec<usize> = witness.into_iter().map(|v| active[v]).collect();
    witness.sort_unstable();
    Ok(DensityCertificate {
        value: best,
        witness,
    })
}

fn induced_count(pairs: &[(usize, usize, Cap)], inside: &[bool]) -> i64 {
    pairs
        .iter()
        .filter(|&&(u, v, _)| inside[u] && inside[v])
        .map(|p| p.2)
        .sum()
}

/// Max density of a base graph, with closed forms for implicit complete graphs.
pub fn max_density_of_graph(g: &BaseGraph) -> Result<DensityCertificate, OfflineError> {
    if g.is_empty() {
        return Err(OfflineError::EmptyGraph);
    }
    if let Some(k) = g.implicit_complete_order() {
        let n = g.vertex_count() as i64;
        let value = if g.is_oriented_complete() {
            oriented_complete_density(k)
        } else {
            Rational::new(n - 1, 2)
        };
        return Ok(DensityCertificate {
            value,
            witness: (0..g.vertex_count()).collect(),
        });
    }
    max_density(&Multigraph::from_graph(g))
}

/// `rho*` of the circulant split of `K_n`. For `n >= 5` the whole graph is
/// densest, `(n-1)/4`; tiny cases are solved directly.
pub(crate) fn oriented_complete_density(n: usize) -> Rational {
    if n >= 5 {
        return Rational::new(n as i64 - 1, 4);
    }
    let g = BaseGraph::oriented_complete(n);
    max_density(&Multigraph::from_pairs(2 * n, g.edges()))
        .expect("n >= 2")
        .value
}

/// Peeling 2-approximation: repeatedly remove a minimum-degree vertex,
/// orienting its remaining edges into it. Returns the best density seen among
/// the peeled suffixes and the orientation.
pub fn peel_approx(h: &Multigraph) -> Result<(Rational, Orientation), OfflineError> {
    let m = h.edge_total();
    if m == 0 {
        return Err(OfflineError::EmptyGraph);
    }
    let n = h.vertex_count;
    // adjacency over distinct pairs
    let mut start = vec![0usize; n + 1];
    for &(u, v, _) in &h.pairs {
        start[u as usize + 1] += 1;
        start[v as usize + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut adj = vec![(0u32, 0u32); start[n]];
    for (pi, &(u, v, _)) in h.pairs.iter().enumerate() {
        adj[fill[u as usize]] = (v, pi as u32);
        fill[u as usize] += 1;
        adj[fill[v as usize]] = (u, pi as u32);
        fill[v as usize] += 1;
    }
    let mut deg = h.degrees();
    let max_deg = deg.iter().copied().max().unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max_deg + 1];
    for (v, &d) in deg.iter().enumerate() {
        buckets[d as usize].push(v as u32);
    }
    let mut removed = vec![false; n];
    // copies of each pair directed into its smaller endpoint
    let mut into_lower = vec![0u32; h.pairs.len()];

    let mut remaining_edges = m as i64;
    let mut remaining_vertices = n as i64;
    let mut best = Rational::new(remaining_edges, remaining_vertices);
    let mut cur = 0usize;
    for _ in 0..n {
        let v = loop {
            while buckets[cur].is_empty() {
                cur += 1;
            }
            let v = buckets[cur].pop().unwrap() as usize;
            if !removed[v] && deg[v] as usize == cur {
                break v;
            }
        };
        removed[v] = true;
        for &(w, pi) in &adj[start[v]..start[v + 1]] {
            let w = w as usize;
            if removed[w] {
                continue;
            }
            let c = h.pairs[pi as usize].2;
            if (v as u32) < (w as u32) {
                into_lower[pi as usize] = c;
            }
            deg[w] -= c as u64;
            let d = deg[w] as usize;
            buckets[d].push(w as u32);
            cur = cur.min(d);
        }
        remaining_edges -= deg[v] as i64;
        deg[v] = 0;
        remaining_vertices -= 1;
        if remaining_vertices > 0 {
            best = best.max(Rational::new(remaining_edges, remaining_vertices));
        }
    }
    let heads = expand_heads(h, &into_lower);
    Ok((best, Orientation::from_heads(n, heads)))
}

/// Per-edge heads from per-pair counts of copies directed into the smaller
/// endpoint.
fn expand_heads(h: &Multigraph, into_lower: &[u32]) -> Vec<u32> {
    let mut left = into_lower.to_vec();
    h.edges
        .iter()
        .zip(&h.pair_of_edge)
        .map(|(_, &pi)| {
            let (u, v, _) = h.pairs[pi as usize];
            if left[pi as usize] > 0 {
                left[pi as usize] -= 1;
                u
            } else {
                v
            }
        })
        .collect()
}

/// Tries to reorient `into_lower` so that no in-degree exceeds `k`. One max
/// flow over the reversal network: load moves from a vertex to a neighbour by
/// flipping one of the copies that currently points into it.
fn reorient_to(h: &Multigraph, into_lower: &[u32], k: u64) -> Option<Vec<u32>> {
    let n = h.vertex_count;
    let mut indeg = vec![0u64; n];
    for (&(u, v, c), &x) in h.pairs.iter().zip(into_lower) {
        indeg[u as usize] += x as u64;
        indeg[v as usize] += (c - x) as u64;
    }
    let (src, sink) = (n, n + 1);
    let mut net = FlowNetwork::with_capacity(n + 2, 2 * h.pairs.len() + n);
    let mut need: Cap = 0;
    for (v, &d) in indeg.iter().enumerate() {
        if d > k {
            net.add_arc(src, v, (d - k) as Cap);
            need += (d - k) as Cap;
        } else if d < k {
            net.add_arc(v, sink, (k - d) as Cap);
        }
    }
    if need == 0 {
        return Some(into_lower.to_vec());
    }
    let mut arcs = Vec::with_capacity(h.pairs.len());
    for (&(u, v, c), &x) in h.pairs.iter().zip(into_lower) {
        let down = net.add_arc(u as usize, v as usize, x as Cap);
        let up = net.add_arc(v as usize, u as usize, (c - x) as Cap);
        arcs.push((down, up));
    }
    if net.max_flow(src, sink) < need {
        return None;
    }
    Some(
        into_lower
            .iter()
            .zip(&arcs)
            .map(|(&x, &(down, up))| (x as Cap - net.flow_on(down) + net.flow_on(up)) as u32)
            .collect(),
    )
}

/// Orientation minimizing the maximum in-degree. Binary search on the target
/// load between the whole-graph density bound and the peeling orientation,
/// one exact max flow per probe.
pub fn optimal_orientation(h: &Multigraph) -> Result<Orientation, OfflineError> {
    let (_, peeled) = peel_approx(h)?;
    let mut into_lower = vec![0u32; h.pairs.len()];
    for (&head, &pi) in peeled.heads.iter().zip(&h.pair_of_edge) {
        if head == h.pairs[pi as usize].0 {
            into_lower[pi as usize] += 1;
        }
    }
    let active = h.degrees().iter().filter(|&&d| d > 0).count() as u64;
    let m = h.edge_total();
    let mut lo = m.div_ceil(active).max(1);
    let mut hi = peeled.max_in_degree;
    let mut best = into_lower;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match reorient_to(h, &best, mid) {
            Some(o) => {
                best = o;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let heads = expand_heads(h, &best);
    let o = Orientation::from_heads(h.vertex_count, heads);
    debug_assert_eq!(o.max_in_degree, hi);
    Ok(o)
}

/// Exact offline optimum `M*` of a sample: `ceil(rho*)` of the arrival
/// multigraph. Zero for an empty sample.
pub fn offline_opt(g: &BaseGraph, sample: &SampledStream) -> u64 {
    if sample.is_empty() {
        return 0;
    }
    let h = g.multigraph_of(&sample.arrivals);
    ceil_u64(&max_density(&h).expect("nonempty sample").value)
}

/// Lower estimate of `M*` from the peeling value, for samples above the exact
/// budget: `ceil(value) <= ceil(rho*)`.
pub fn offline_opt_approx(g: &BaseGraph, sample: &SampledStream) -> u64 {
    if sample.is_empty() {
        return 0;
    }
    let h = g.multigraph_of(&sample.arrivals);
    ceil_u64(&peel_approx(&h).expect("nonempty sample").0)
}

/// Bipartite split of a base graph along an optimal orientation. Vertex `u`
/// becomes `u` (Left, head copy) and `n + u` (Right, tail copy); edge indices
/// are preserved.
#[derive(Debug, Clone)]
pub struct Bipartization {
    pub graph: BaseGraph,
    pub base_vertices: usize,
}

impl Bipartization {
    /// Vertex of the base graph that `h_vertex` is a copy of.
    pub fn base_vertex(&self, h_vertex: usize) -> usize {
        h_vertex % self.base_vertices
    }

    /// Merges per-vertex loads on the split graph back onto the base graph.
    pub fn translate_loads(&self, loads: &[u64]) -> Vec<u64> {
        let n = self.base_vertices;
        (0..n).map(|u| loads[u] + loads[n + u]).collect()
    }
}

pub fn bipartize(g: &BaseGraph) -> Result<Bipartization, OfflineError> {
    if g.is_empty() {
        return Err(OfflineError::EmptyGraph);
    }
    let n = g.vertex_count();
    if let Some(k) = g.implicit_complete_order() {
        if !g.is_oriented_complete() {
            return Ok(Bipartization {
                graph: BaseGraph::oriented_complete(k),
                base_vertices: n,
            });
        }
    }
    let h = Multigraph::from_graph(g);
    let o = optimal_orientation(&h)?;
    let edges = g
        .edges()
        .zip(&o.heads)
        .map(|((u, v), &head)| {
            let head = head as usize;
            let tail = if head == u { v } else { u };
            (head, n + tail)
        })
        .collect();
    let sides = (0..2 * n)
        .map(|v| if v < n { Side::Left } else { Side::Right })
        .collect();
    Ok(Bipartization {
        graph: BaseGraph::with_sides(sides, edges)?,
        base_vertices: n,
    })
}

/// Reference values for the expected optimum, with the hidden constants set
/// to 1. `multiplicity_lb` is a heuristic guide, not a certified bound.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBounds {
    /// `2 T rho* / (n d_av)`
    pub density_lb: Rational,
    /// `log n / log((n d_av / T) log n)` for `T <= n`, else 0.
    pub multiplicity_lb: f64,
}

pub fn lower_bounds(g: &BaseGraph, t: u64) -> Result<LowerBounds, OfflineError> {
    let rho = max_density_of_graph(g)?.value;
    Ok(lower_bounds_with(g, t, rho))
}

/// [`lower_bounds`] with a precomputed `rho*`.
pub fn lower_bounds_with(g: &BaseGraph, t: u64, rho: Rational) -> LowerBounds {
    let stats = degree_stats(g);
    let n = g.vertex_count();
    // n * d_av = 2m
    let two_m = 2 * stats.edge_count as i64;
    let density_lb = if two_m.is_zero() {
        Rational::zero()
    } else {
        Rational::from_integer(2 * t as i64) * rho / Rational::from_integer(two_m)
    };
    let multiplicity_lb = if t == 0 || t as usize > n || two_m.is_zero() {
        0.0
    } else {
        let log_n = log2_n(n);
        let arg = (two_m as f64 / t as f64) * log_n;
        log_n / arg.max(2.0).log2()
    };
    LowerBounds {
        density_lb,
        multiplicity_lb,
    }
}

impl LowerBounds {
    pub fn density_lb_f64(&self) -> f64 {
        self.density_lb.to_f64().unwrap_or(f64::NAN)
    }
}

impl std::fmt::Display for LowerBounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "density_lb={} multiplicity_lb={:.6} (heuristic)",
            RationalText(&self.density_lb),
            self.multiplicity_lb
        )
    }
}
