//! Brute-force oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use balance_core::{bipartize, degree_stats, max_density, BaseGraph, Multigraph, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum over all `2^m` orientations of the maximum in-degree.
pub fn brute_orientation(n: usize, edges: &[(usize, usize)]) -> u64 {
    let m = edges.len();
    let mut best = u64::MAX;
    let mut indeg = vec![0u64; n];
    for mask in 0u32..(1u32 << m) {
        indeg.iter_mut().for_each(|x| *x = 0);
        for (k, &(u, v)) in edges.iter().enumerate() {
            indeg[if mask >> k & 1 == 1 { u } else { v }] += 1;
        }
        best = best.min(indeg.iter().copied().max().unwrap_or(0));
    }
    best
}

/// Max over nonempty vertex subsets of `|E(S)| / |S|`.
pub fn brute_density(n: usize, edges: &[(usize, usize)]) -> Rational {
    let mut best = Rational::from_integer(0);
    for set in 1u32..(1u32 << n) {
        let inside = edges
            .iter()
            .filter(|&&(u, v)| set >> u & 1 == 1 && set >> v & 1 == 1)
            .count();
        let d = Rational::new(inside as i64, set.count_ones() as i64);
        if d > best {
            best = d;
        }
    }
    best
}

/// Random multigraph without self-loops.
pub fn random_multigraph(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_m: usize,
) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(1..=max_m);
    let edges = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    (n, edges)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Random bipartite multigraph with `n` vertices split at a random ratio
/// and about `d_av n / 2` uniform edges.
pub fn random_bipartite(rng: &mut ChaCha8Rng, n: usize, d_av: f64) -> BaseGraph {
    let frac: f64 = rng.gen_range(0.02..0.98);
    let n_left = ((n as f64 * frac) as usize).clamp(1, n - 1);
    let n_right = n - n_left;
    let m = ((d_av * n as f64 / 2.0).round() as usize).max(1);
    let edges = (0..m)
        .map(|_| (rng.gen_range(0..n_left), n_left + rng.gen_range(0..n_right)))
        .collect();
    BaseGraph::bipartite(n_left, n_right, edges).unwrap()
}

/// Random instance drawn log-uniformly up to `max_n` vertices and average
/// degree `max_d`, made left-degree-bounded by splitting when needed.
pub fn random_left_bounded(rng: &mut ChaCha8Rng, max_n: usize, max_d: f64) -> BaseGraph {
    let n = log_uniform(rng, 8.0, max_n as f64) as usize;
    let d = log_uniform(rng, 1.0, max_d);
    left_bounded(random_bipartite(rng, n.max(8), d))
}

/// The graph itself when `Δ_L ≤ 4ρ*`, otherwise its bipartite split.
pub fn left_bounded(g: BaseGraph) -> BaseGraph {
    if g.is_bipartite() && !needs_split(&g) {
        return g;
    }
    bipartize(&g).unwrap().graph
}

fn needs_split(g: &BaseGraph) -> bool {
    let rho = max_density(&Multigraph::from_graph(g)).unwrap().value;
    Rational::from_integer(degree_stats(g).max_left_degree as i64) > rho * 4
}
