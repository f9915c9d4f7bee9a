//! Deterministic instance families.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{rng_from_seed, BaseGraph};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("instance would have {edges} edges, over the budget of {budget}")]
    BudgetExceeded { edges: u64, budget: u64 },
}

fn infeasible<T>(msg: impl Into<String>) -> Result<T, GenError> {
    Err(GenError::Infeasible(msg.into()))
}

/// `K_n`, stored implicitly.
pub fn gen_complete(n: usize) -> Result<BaseGraph, GenError> {
    if n < 2 {
        return infeasible("K_n needs n >= 2");
    }
    Ok(BaseGraph::complete_implicit(n))
}

/// Simple `d`-regular graph on `n` vertices, built from `d/2` random
/// Hamiltonian cycles plus one random perfect matching when `d` is odd.
/// Repeated edges are repaired by random swaps.
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<BaseGraph, GenError> {
    if d >= n {
        return infeasible(format!("degree {d} must be below n = {n}"));
    }
    if n * d % 2 == 1 {
        return infeasible(format!("n * d = {} is odd", n * d));
    }
    if d == 0 {
        return Ok(BaseGraph::new(n, Vec::new()).expect("empty graph"));
    }
    let mut rng = rng_from_seed(seed);
    // dense requests are built as complements of sparse ones
    if 2 * d > n - 1 {
        let co = regular_edges(n, n - 1 - d, &mut rng);
        let co: HashSet<(usize, usize)> = co.into_iter().collect();
        let mut edges = Vec::with_capacity(n * d / 2);
        for u in 0..n {
            for v in u + 1..n {
                if !co.contains(&(u, v)) {
                    edges.push((u, v));
                }
            }
        }
        return Ok(BaseGraph::new(n, edges).expect("valid"));
    }
    Ok(BaseGraph::new(n, regular_edges(n, d, &mut rng)).expect("valid"))
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Edges as `(min, max)` pairs; `2 d <= n - 1`. When the factors keep
/// stalling against each other (typical near `d = n/2`), falls back to a
/// circulant graph shuffled by edge switches.
fn regular_edges(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut factors: Vec<bool> = vec![true; d / 2];
    if d % 2 == 1 {
        factors.push(false);
    }
    'restart: for _ in 0..16 {
        let mut used: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        for &cycle in &factors {
            let Some(pairs) = (0..4).find_map(|_| random_factor(n, cycle, &used, rng)) else {
                continue 'restart;
            };
            for (u, v) in pairs {
                used.insert(key(u, v));
                edges.push(key(u, v));
            }
        }
        return edges;
    }
    switched_circulant(n, d, rng)
}

/// Circulant `d`-regular graph (offsets `1..=d/2`, plus `n/2` for odd `d`)
/// followed by `10 m` random degree-preserving double-edge switches.
fn switched_circulant(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(n * d / 2);
    for k in 1..=d / 2 {
        edges.extend((0..n).map(|u| key(u, (u + k) % n)));
    }
    if d % 2 == 1 {
        edges.extend((0..n / 2).map(|u| key(u, u + n / 2)));
    }
    let mut used: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let m = edges.len();
    for _ in 0..10 * m {
        let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
        let ((a, b), (c, e)) = (edges[i], edges[j]);
        let (x, y) = if rng.gen_bool(0.5) {
            (key(a, c), key(b, e))
        } else {
            (key(a, e), key(b, c))
        };
        if x.0 == x.1 || y.0 == y.1 || x == y || used.contains(&x) || used.contains(&y) {
            continue;
        }
        used.remove(&edges[i]);
        used.remove(&edges[j]);
        used.insert(x);
        used.insert(y);
        edges[i] = x;
        edges[j] = y;
    }
    edges
}

/// A Hamiltonian cycle (`cycle`) or perfect matching avoiding `used`, or
/// `None` when repair stalls.
fn random_factor(
    n: usize,
    cycle: bool,
    used: &HashSet<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(usize, usize)>> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    let slots = if cycle { n } else { n / 2 };
    let pair = |p: &[usize], k: usize| {
        if cycle {
            (p[k], p[(k + 1) % n])
        } else {
            (p[2 * k], p[2 * k + 1])
        }
    };
    let bad = |p: &[usize], k: usize| {
        let (u, v) = pair(p, k);
        used.contains(&key(u, v))
    };
    let mut pending: Vec<usize> = (0..slots).filter(|&k| bad(&p, k)).collect();
    for _ in 0..64 * (slots + 16) {
        if pending.is_empty() {
            let pairs: Vec<_> = (0..slots).map(|k| pair(&p, k)).collect();
            // a cycle on 2 vertices would repeat its edge
            if cycle && n < 3 {
                return None;
            }
            return Some(pairs);
        }
        let k = pending[rng.gen_range(0..pending.len())];
        let a = if cycle { (k + 1) % n } else { 2 * k + 1 };
        let b = rng.gen_range(0..n);
        p.swap(a, b);
        // only slots touching positions a and b changed
        let mut touched = Vec::with_capacity(4);
        for pos in [a, b] {
            if cycle {
                touched.push(pos);
                touched.push((pos + n - 1) % n);
            } else {
                touched.push(pos / 2);
            }
        }
        pending.retain(|k| !touched.contains(k));
        for t in touched {
            if bad(&p, t) && !pending.contains(&t) {
                pending.push(t);
            }
        }
    }
    None
}

/// `K_{a,b}` with the `a` side on the Left.
pub fn gen_complete_bipartite(a: usize, b: usize) -> Result<BaseGraph, GenError> {
    if a == 0 || b == 0 {
        return infeasible("both sides need at least one vertex");
    }
    let mut edges = Vec::with_capacity(a * b);
    for i in 0..a {
        for j in 0..b {
            edges.push((i, a + j));
        }
    }
    Ok(BaseGraph::bipartite(a, b, edges).expect("valid"))
}

/// Biregular imbalanced graph: `|A| = f^(s+1) |B|`, left degree `d/f`, right
/// degree `d f^s`. `A` is the Left side, vertices `0..|A|`. A-vertex `j`
/// connects to B-vertices `(j d_L + r) mod |B|` for `r < d_L`.
pub fn gen_biregular_imbalanced(
    b_size: usize,
    f: u64,
    s: u32,
    d: u64,
) -> Result<BaseGraph, GenError> {
    if f < 2 || s < 1 || b_size == 0 {
        return infeasible("need f >= 2, s >= 1 and |B| >= 1");
    }
    if !d.is_multiple_of(f) || d < f {
        return infeasible(format!("d / f = {d} / {f} must be a positive integer"));
    }
    let d_l = (d / f) as usize;
    if d_l > b_size {
        return infeasible(format!(
            "left degree {d_l} exceeds |B| = {b_size}; edges would repeat"
        ));
    }
    let a_size = f
        .checked_pow(s + 1)
        .and_then(|x| x.checked_mul(b_size as u64))
        .filter(|&x| x <= u32::MAX as u64)
        .ok_or_else(|| GenError::Infeasible("|A| overflows".into()))? as usize;
    let mut edges = Vec::with_capacity(a_size * d_l);
    for j in 0..a_size {
        for r in 0..d_l {
            edges.push((j, a_size + (j * d_l + r) % b_size));
        }
    }
    Ok(BaseGraph::bipartite(a_size, b_size, edges).expect("valid"))
}

/// Layered construction: layers `V_1..V_b` with `|V_i| = t^i g`; between
/// `V_i` and `V_{i+1}` there are `t^i` disjoint blocks `K_{g, g t}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LayeredLBParams {
    pub group_size: u64,
    pub ratio: u64,
    pub layers: u32,
}

impl LayeredLBParams {
    /// `|V_i|` for 1-based `i`.
    pub fn layer_size(&self, i: u32) -> Option<u64> {
        self.ratio.checked_pow(i)?.checked_mul(self.group_size)
    }

    pub fn vertex_count(&self) -> Option<u64> {
        (1..=self.layers).try_fold(0u64, |acc, i| acc.checked_add(self.layer_size(i)?))
    }

    pub fn edge_count(&self) -> Option<u64> {
        let block = self
            .group_size
            .checked_mul(self.group_size)?
            .checked_mul(self.ratio)?;
        (1..self.layers).try_fold(0u64, |acc, i| {
            acc.checked_add(self.ratio.checked_pow(i)?.checked_mul(block)?)
        })
    }

    /// Parameters coupled to a target size the way the asymptotic
    /// construction does it: `g = ⌈√n⌉`, `t = ⌈(log2 n)^3⌉`, and the largest
    /// `b ≥ 2` with `g t^b ≤ n`. Far too large for experiments at small `n`.
    pub fn coupled(n: u64) -> Self {
        let log_n = (n.max(4) as f64).log2();
        let g = (n as f64).sqrt().ceil() as u64;
        let t = log_n.powi(3).ceil() as u64;
        let mut b = 2u32;
        while g
            .checked_mul(t.saturating_pow(b + 1))
            .is_some_and(|x| x <= n)
        {
            b += 1;
        }
        LayeredLBParams {
            group_size: g,
            ratio: t,
            layers: b,
        }
    }
}

pub const DEFAULT_EDGE_BUDGET: u64 = 50_000_000;

/// Builds the layered graph. Odd layers are Left, even layers Right; the
/// 1-based layer of every vertex is recorded.
pub fn gen_layered_lb(p: LayeredLBParams, edge_budget: u64) -> Result<BaseGraph, GenError> {
    if p.group_size < 2 || p.ratio < 2 || p.layers < 2 {
        return infeasible("need g >= 2, t >= 2, b >= 2");
    }
    let overflow = || GenError::BudgetExceeded {
        edges: u64::MAX,
        budget: edge_budget,
    };
    let m = p.edge_count().ok_or_else(overflow)?;
    let n = p.vertex_count().ok_or_else(overflow)?;
    if m > edge_budget || n > u32::MAX as u64 {
        return Err(GenError::BudgetExceeded {
            edges: m,
            budget: edge_budget,
        });
    }
    let (g, t) = (p.group_size as usize, p.ratio as usize);
    let mut start = Vec::with_capacity(p.layers as usize + 1);
    let mut layer = Vec::with_capacity(n as usize);
    let mut acc = 0usize;
    for i in 1..=p.layers {
        start.push(acc);
        let size = p.layer_size(i).unwrap() as usize;
        layer.extend(std::iter::repeat_n(i, size));
        acc += size;
    }
    let mut edges = Vec::with_capacity(m as usize);
    for i in 1..p.layers {
        let (lo, hi) = (start[i as usize - 1], start[i as usize]);
        let blocks = t.pow(i);
        for k in 0..blocks {
            for a in 0..g {
                for b in 0..g * t {
                    let u = lo + k * g + a;
                    let v = hi + k * g * t + b;
                    // Left endpoint first
                    edges.push(if i % 2 == 1 { (u, v) } else { (v, u) });
                }
            }
        }
    }
    let sides = layer
        .iter()
        .map(|&i| {
            if i % 2 == 1 {
                crate::graph::Side::Left
            } else {
                crate::graph::Side::Right
            }
        })
        .collect();
    Ok(BaseGraph::with_sides(sides, edges)
        .expect("valid")
        .with_layers(layer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_stats;
    use crate::numeric::Rational;

    fn is_simple(g: &BaseGraph) -> bool {
        let mut seen = HashSet::new();
        g.edges().all(|(u, v)| u != v && seen.insert(key(u, v)))
    }

    #[test]
    fn complete() {
        assert_eq!(gen_complete(4).unwrap().edge_count(), 6);
        let k2 = gen_complete(2).unwrap();
        assert_eq!(k2.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(
            degree_stats(&gen_complete(9).unwrap()).avg_degree,
            Rational::from_integer(8)
        );
        assert!(gen_complete(1).is_err());
    }

    #[test]
    fn regular() {
        let g = gen_regular(6, 2, 1).unwrap();
        assert!(g.degrees().iter().all(|&x| x == 2));
        for seed in 0..20 {
            let g = gen_regular(8, 3, seed).unwrap();
            assert!(g.degrees().iter().all(|&x| x == 3), "seed {seed}");
            assert!(is_simple(&g));
        }
        assert!(matches!(gen_regular(5, 3, 0), Err(GenError::Infeasible(_))));
        assert!(gen_regular(4, 4, 0).is_err());
        // dense case goes through the complement
        let g = gen_regular(10, 7, 4).unwrap();
        assert!(g.degrees().iter().all(|&x| x == 7));
        assert!(is_simple(&g));
        let a = gen_regular(1000, 16, 9).unwrap();
        let b = gen_regular(1000, 16, 9).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert!(a.degrees().iter().all(|&x| x == 16));
        assert!(is_simple(&a));
    }

    #[test]
    fn complete_bipartite() {
        assert_eq!(gen_complete_bipartite(1, 1).unwrap().edge_count(), 1);
        let g = gen_complete_bipartite(4, 2).unwrap();
        let st = degree_stats(&g);
        assert_eq!((st.max_left_degree, st.max_right_degree), (2, 4));
        assert_eq!(g.edge_count(), 8);
    }

    #[test]
    fn biregular() {
        assert!(matches!(
            gen_biregular_imbalanced(1, 2, 1, 4),
            Err(GenError::Infeasible(_))
        ));
        let g = gen_biregular_imbalanced(4, 2, 1, 4).unwrap();
        assert_eq!(g.vertex_count(), 20);
        assert_eq!(g.edge_count(), 32);
        let deg = g.degrees();
        assert!(deg[..16].iter().all(|&x| x == 2));
        assert!(deg[16..].iter().all(|&x| x == 8));
        assert!(is_simple(&g));
        assert!(gen_biregular_imbalanced(4, 3, 1, 4).is_err());
    }

    #[test]
    fn layered() {
        let p = LayeredLBParams {
            group_size: 2,
            ratio: 2,
            layers: 2,
        };
        let g = gen_layered_lb(p, DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 16);
        let deg = g.degrees();
        assert!(deg[..4].iter().all(|&x| x == 4));
        assert!(deg[4..].iter().all(|&x| x == 2));
        let big = LayeredLBParams {
            group_size: 16,
            ratio: 4,
            layers: 6,
        };
        assert_eq!(big.vertex_count(), Some(87_360));
        assert_eq!(big.edge_count(), Some(1_396_736));
        assert!(matches!(
            gen_layered_lb(big, 1_000_000),
            Err(GenError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn layered_blocks() {
        let p = LayeredLBParams {
            group_size: 3,
            ratio: 2,
            layers: 4,
        };
        let g = gen_layered_lb(p, DEFAULT_EDGE_BUDGET).unwrap();
        let layers = g.layers().unwrap();
        let deg = g.degrees();
        for v in 0..g.vertex_count() {
            let i = layers[v];
            let down = if i < 4 { 6 } else { 0 };
            let up = if i > 1 { 3 } else { 0 };
            assert_eq!(deg[v], down + up, "vertex {v} in layer {i}");
        }
        for (u, v) in g.edges() {
            assert_eq!(layers[u].abs_diff(layers[v]), 1);
        }
        assert!(is_simple(&g));
    }

    #[test]
    fn coupled_params_are_consistent() {
        let p = LayeredLBParams::coupled(1 << 40);
        assert_eq!(p.group_size, 1 << 20);
        assert_eq!(p.ratio, 64_000);
        assert!(p.layers >= 2);
    }
}
