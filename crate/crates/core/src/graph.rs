//! Base graphs, degree statistics, i.i.d. edge sampling and component sizes.
//!
//! A [`BaseGraph`] is immutable once built. Edges are addressed by index; the
//! sampled stream stores indices so that repeated draws of the same edge stay
//! distinguishable. Complete graphs can be held implicitly (edges ranked in
//! lexicographic `u < v` order) so that `K_n` at `n = 2^16` never has to be
//! materialized.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: endpoint {vertex} out of range for {n} vertices")]
    EndpointRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: edge ({u}, {v}) does not join a Left and a Right vertex")]
    SideViolation { line: usize, u: usize, v: usize },
    #[error("cannot sample {0} arrivals from a graph with no edges")]
    EmptySample(usize),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("operation needs an explicit edge list, graph is implicit K_{0}")]
    Implicit(usize),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(e: std::io::Error) -> Self {
        GraphError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum EdgeStore {
    Explicit(Vec<(u32, u32)>),
    /// `K_n`, edge `e` is the `e`-th pair `u < v` in lexicographic order.
    Complete,
    /// `K_n` under the circulant orientation, split into a head copy (Left,
    /// `0..n`) and a tail copy (Right, `n..2n`).
    OrientedComplete {
        base_n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    n: usize,
    store: EdgeStore,
    sides: Option<Vec<Side>>,
    layers: Option<Vec<u32>>,
}

impl BaseGraph {
    /// General (untagged) graph.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let edges = check_edges(n, &edges)?;
        Ok(BaseGraph {
            n,
            store: EdgeStore::Explicit(edges),
            sides: None,
            layers: None,
        })
    }

    /// Bipartite graph with Left vertices `0..n_left` and Right vertices
    /// `n_left..n_left+n_right`. Edges are stored Left endpoint first.
    pub fn bipartite(
        n_left: usize,
        n_right: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let sides = (0..n_left + n_right)
            .map(|v| if v < n_left { Side::Left } else { Side::Right })
            .collect();
        Self::with_sides(sides, edges)
    }

    /// Bipartite graph with an arbitrary side assignment.
    pub fn with_sides(sides: Vec<Side>, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let n = sides.len();
        let mut edges = check_edges(n, &edges)?;
        for (i, e) in edges.iter_mut().enumerate() {
            let (su, sv) = (sides[e.0 as usize], sides[e.1 as usize]);
            if su == sv {
                return Err(GraphError::SideViolation {
                    line: i + 1,
                    u: e.0 as usize,
                    v: e.1 as usize,
                });
            }
            if su == Side::Right {
                *e = (e.1, e.0);
            }
        }
        Ok(BaseGraph {
            n,
            store: EdgeStore::Explicit(edges),
            sides: Some(sides),
            layers: None,
        })
    }

    /// Implicit `K_n`.
    pub fn complete_implicit(n: usize) -> Self {
        assert!(n >= 2, "K_n needs n >= 2");
        BaseGraph {
            n,
            store: EdgeStore::Complete,
            sides: None,
            layers: None,
        }
    }

    /// Bipartite split of `K_n` under the circulant orientation: edge `e` of
    /// `K_n` becomes `(head, n + tail)`.
    pub(crate) fn oriented_complete(base_n: usize) -> Self {
        let sides = (0..2 * base_n)
            .map(|v| if v < base_n { Side::Left } else { Side::Right })
            .collect();
        BaseGraph {
            n: 2 * base_n,
            store: EdgeStore::OrientedComplete { base_n },
            sides: Some(sides),
            layers: None,
        }
    }

    pub fn with_layers(mut self, layers: Vec<u32>) -> Self {
        assert_eq!(layers.len(), self.n);
        self.layers = Some(layers);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        match &self.store {
            EdgeStore::Explicit(e) => e.len(),
            EdgeStore::Complete => self.n * (self.n - 1) / 2,
            EdgeStore::OrientedComplete { base_n } => base_n * (base_n - 1) / 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }

    pub fn is_bipartite(&self) -> bool {
        self.sides.is_some()
    }

    pub fn side(&self, v: usize) -> Option<Side> {
        self.sides.as_ref().map(|s| s[v])
    }

    pub fn sides(&self) -> Option<&[Side]> {
        self.sides.as_deref()
    }

    pub fn layers(&self) -> Option<&[u32]> {
        self.layers.as_deref()
    }

    /// Base vertex count when this graph is implicit `K_n` or its oriented
    /// split.
    pub fn implicit_complete_order(&self) -> Option<usize> {
        match self.store {
            EdgeStore::Explicit(_) => None,
            EdgeStore::Complete => Some(self.n),
            EdgeStore::OrientedComplete { base_n } => Some(base_n),
        }
    }

    pub fn is_oriented_complete(&self) -> bool {
        matches!(self.store, EdgeStore::OrientedComplete { .. })
    }

    /// Endpoints of edge `e`; for bipartite graphs the Left endpoint first.
    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        match &self.store {
            EdgeStore::Explicit(edges) => {
                let (u, v) = edges[e];
                (u as usize, v as usize)
            }
            EdgeStore::Complete => unrank_pair(self.n, e),
            EdgeStore::OrientedComplete { base_n } => {
                let (u, v) = unrank_pair(*base_n, e);
                let (head, tail) = circulant_head_tail(*base_n, u, v);
                (head, base_n + tail)
            }
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.edge_count()).map(move |e| self.edge(e))
    }

    /// Explicit edge slice, or an error for implicit complete graphs.
    pub fn explicit_edges(&self) -> Result<&[(u32, u32)], GraphError> {
        match &self.store {
            EdgeStore::Explicit(e) => Ok(e),
            _ => Err(GraphError::Implicit(
                self.implicit_complete_order().unwrap(),
            )),
        }
    }

    pub fn degrees(&self) -> Vec<u64> {
        match &self.store {
            EdgeStore::Explicit(edges) => {
                let mut deg = vec![0u64; self.n];
                for &(u, v) in edges {
                    deg[u as usize] += 1;
                    deg[v as usize] += 1;
                }
                deg
            }
            EdgeStore::Complete => vec![self.n as u64 - 1; self.n],
            EdgeStore::OrientedComplete { base_n } => {
                let n = *base_n;
                let half = (n as u64 - 1) / 2;
                (0..2 * n)
                    .map(|v| {
                        if n % 2 == 1 {
                            half
                        } else if v < n {
                            // heads: diameters point into the upper half
                            half + u64::from(v >= n / 2)
                        } else {
                            half + u64::from(v - n < n / 2)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Content hash over vertex count, sides and edge list (hex, 16 chars).
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        match &self.store {
            EdgeStore::Explicit(edges) => {
                for &(u, v) in edges {
                    h.update(u.to_le_bytes());
                    h.update(v.to_le_bytes());
                }
            }
            EdgeStore::Complete => h.update(b"complete"),
            EdgeStore::OrientedComplete { base_n } => {
                h.update(b"oriented-complete");
                h.update((*base_n as u64).to_le_bytes());
            }
        }
        if let Some(sides) = &self.sides {
            for s in sides {
                h.update([*s as u8]);
            }
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Multigraph on the same vertex set holding the given edges (with
    /// repetitions).
    pub fn multigraph_of(&self, edge_indices: &[usize]) -> Multigraph {
        Multigraph::from_pairs(self.n, edge_indices.iter().map(|&e| self.edge(e)))
    }
}

fn check_edges(n: usize, edges: &[(usize, usize)]) -> Result<Vec<(u32, u32)>, GraphError> {
    assert!(n <= u32::MAX as usize);
    edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::EndpointRange {
                        line: i + 1,
                        vertex: w,
                        n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop {
                    line: i + 1,
                    vertex: u,
                });
            }
            Ok((u as u32, v as u32))
        })
        .collect()
}

/// Index of the first pair `(u, u+1)` in row `u` of the lexicographic ranking.
fn row_start(n: usize, u: usize) -> usize {
    u * (2 * n - u - 1) / 2
}

#[cfg(test)]
pub(crate) fn rank_pair(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    row_start(n, u) + (v - u - 1)
}

pub(crate) fn unrank_pair(n: usize, e: usize) -> (usize, usize) {
    let b = (2 * n - 1) as f64;
    let disc = (b * b - 8.0 * e as f64).max(0.0);
    let mut u = ((b - disc.sqrt()) / 2.0).floor().max(0.0) as usize;
    u = u.min(n - 2);
    while u > 0 && row_start(n, u) > e {
        u -= 1;
    }
    while u + 1 < n - 1 && row_start(n, u + 1) <= e {
        u += 1;
    }
    (u, u + 1 + e - row_start(n, u))
}

/// Head and tail of `{u, v}` (u < v) under the circulant orientation of `K_n`:
/// the tail-to-head offset is at most `n/2`, diameters point into `u + n/2`.
pub(crate) fn circulant_head_tail(n: usize, u: usize, v: usize) -> (usize, usize) {
    let d = v - u;
    if 2 * d <= n {
        (v, u)
    } else {
        (u, v)
    }
}

/// Tail-to-head offset of an edge of `K_n` under the circulant orientation, in
/// `1..=n/2`.
pub(crate) fn circulant_offset(n: usize, u: usize, v: usize) -> usize {
    let (head, tail) = circulant_head_tail(n, u.min(v), u.max(v));
    (head + n - tail) % n
}

/// Exact degree statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `2|E|/n`
    pub avg_degree: Rational,
    pub max_left_degree: u64,
    pub max_right_degree: u64,
    /// `|E|/n`
    pub density: Rational,
}

impl GraphStats {
    pub fn is_empty(&self) -> bool {
        self.edge_count == 0
    }
}

pub fn degree_stats(g: &BaseGraph) -> GraphStats {
    let n = g.vertex_count();
    let m = g.edge_count();
    if m == 0 || n == 0 {
        return GraphStats {
            vertex_count: n,
            edge_count: 0,
            avg_degree: Rational::zero(),
            max_left_degree: 0,
            max_right_degree: 0,
            density: Rational::zero(),
        };
    }
    let deg = g.degrees();
    let (dl, dr) = match g.sides() {
        Some(sides) => {
            let mut dl = 0;
            let mut dr = 0;
            for (v, &d) in deg.iter().enumerate() {
                match sides[v] {
                    Side::Left => dl = dl.max(d),
                    Side::Right => dr = dr.max(d),
                }
            }
            (dl, dr)
        }
        None => {
            let d = deg.iter().copied().max().unwrap_or(0);
            (d, d)
        }
    };
    GraphStats {
        vertex_count: n,
        edge_count: m,
        avg_degree: Rational::new(2 * m as i64, n as i64),
        max_left_degree: dl,
        max_right_degree: dr,
        density: Rational::new(m as i64, n as i64),
    }
}

/// An ordered multiset of i.i.d. uniform edge draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledStream {
    pub arrivals: Vec<usize>,
    pub seed: u64,
    /// Edge count of the base graph the indices refer to.
    pub base_edges: usize,
}

impl SampledStream {
    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// Text form: `sample base_hash T seed`, then one edge index per line.
    pub fn write_to<W: std::io::Write>(&self, g: &BaseGraph, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "sample {} {} {}",
            g.content_hash(),
            self.len(),
            self.seed
        )?;
        for e in &self.arrivals {
            writeln!(w, "{e}")?;
        }
        Ok(())
    }

    pub fn parse(g: &BaseGraph, text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(GraphError::Malformed {
            line: 1,
            msg: "missing sample header".into(),
        })?;
        let f: Vec<&str> = header.split_whitespace().collect();
        let bad = |msg: &str| GraphError::Malformed {
            line: hline,
            msg: msg.into(),
        };
        if f.len() != 4 || f[0] != "sample" {
            return Err(bad("expected `sample base_hash T seed`"));
        }
        if f[1] != g.content_hash() {
            return Err(bad("sample was drawn from a different base graph"));
        }
        let t: usize = f[2].parse().map_err(|_| bad("bad T"))?;
        let seed: u64 = f[3].parse().map_err(|_| bad("bad seed"))?;
        let mut arrivals = Vec::with_capacity(t);
        for (line, l) in lines {
            let e: usize = l.parse().map_err(|_| GraphError::Malformed {
                line,
                msg: format!("bad edge index {l:?}"),
            })?;
            if e >= g.edge_count() {
                return Err(GraphError::Malformed {
                    line,
                    msg: format!("edge index {e} out of range"),
                });
            }
            arrivals.push(e);
        }
        if arrivals.len() != t {
            return Err(bad("arrival count does not match header"));
        }
        Ok(SampledStream {
            arrivals,
            seed,
            base_edges: g.edge_count(),
        })
    }
}

/// Deterministic generator for one seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th child stream of `seed`. Children are independent of
/// each other and of evaluation order.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng.gen()
}

/// `T` uniform draws with replacement from the edge set.
pub fn sample_iid(g: &BaseGraph, t: usize, seed: u64) -> Result<SampledStream, GraphError> {
    let m = g.edge_count();
    if t == 0 {
        return Ok(SampledStream {
            arrivals: Vec::new(),
            seed,
            base_edges: m,
        });
    }
    if m == 0 {
        return Err(GraphError::EmptySample(t));
    }
    let mut rng = rng_from_seed(seed);
    let arrivals = (0..t).map(|_| rng.gen_range(0..m)).collect();
    Ok(SampledStream {
        arrivals,
        seed,
        base_edges: m,
    })
}

/// Sizes of connected components of the subgraph formed by `edge_subset`,
/// descending. Untouched vertices are not reported.
pub fn components(g: &BaseGraph, edge_subset: &[usize]) -> Vec<usize> {
    let mut dsu = Dsu::new(g.vertex_count());
    let mut touched = vec![false; g.vertex_count()];
    for &e in edge_subset {
        let (u, v) = g.edge(e);
        touched[u] = true;
        touched[v] = true;
        dsu.union(u, v);
    }
    let mut size_of_root = std::collections::HashMap::new();
    for v in (0..g.vertex_count()).filter(|&v| touched[v]) {
        *size_of_root.entry(dsu.find(v)).or_insert(0usize) += 1;
    }
    let mut sizes: Vec<usize> = size_of_root.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// Multigraph with both the original edge order and the distinct pairs with
/// multiplicities. Used for samples and as the input of the offline solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    pub vertex_count: usize,
    /// Input edges in their original order.
    pub edges: Vec<(u32, u32)>,
    /// Distinct pairs `(u, v)` with `u < v`, sorted, and their multiplicities.
    pub pairs: Vec<(u32, u32, u32)>,
    /// Index into `pairs` for every input edge.
    pub pair_of_edge: Vec<u32>,
}

impl Multigraph {
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, input: I) -> Self {
        let edges: Vec<(u32, u32)> = input
            .into_iter()
            .map(|(u, v)| {
                debug_assert!(u != v && u < n && v < n);
                (u as u32, v as u32)
            })
            .collect();
        let mut order: Vec<u32> = (0..edges.len() as u32).collect();
        let key = |i: u32| {
            let (u, v) = edges[i as usize];
            (u.min(v), u.max(v))
        };
        order.sort_unstable_by_key(|&i| key(i));
        let mut pairs: Vec<(u32, u32, u32)> = Vec::new();
        let mut pair_of_edge = vec![0u32; edges.len()];
        for i in order {
            let (u, v) = key(i);
            match pairs.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += 1,
                _ => pairs.push((u, v, 1)),
            }
            pair_of_edge[i as usize] = (pairs.len() - 1) as u32;
        }
        Multigraph {
            vertex_count: n,
            edges,
            pairs,
            pair_of_edge,
        }
    }

    pub fn edge_total(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn from_graph(g: &BaseGraph) -> Self {
        Self::from_pairs(g.vertex_count(), g.edges())
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.vertex_count];
        for &(u, v, c) in &self.pairs {
            deg[u as usize] += c as u64;
            deg[v as usize] += c as u64;
        }
        deg
    }

    /// Number of edges (with multiplicity) with both endpoints in `set`.
    pub fn induced_edges(&self, set: &[usize]) -> u64 {
        let mut inside = vec![false; self.vertex_count];
        for &v in set {
            inside[v] = true;
        }
        self.pairs
            .iter()
            .filter(|&&(u, v, _)| inside[u as usize] && inside[v as usize])
            .map(|&(_, _, c)| c as u64)
            .sum()
    }
}

/// On-disk graph encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `n m` / `bipartite nL nR m` header plus `u v` lines.
    EdgeList,
    /// `{"n": .., "edges": [[u, v], ..], "n_left": ..}`; `n_left` marks a
    /// bipartite graph with Left vertices `0..n_left`.
    Json,
}

impl GraphFormat {
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

pub fn load_graph(path: &std::path::Path, format: GraphFormat) -> Result<BaseGraph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(&text),
        GraphFormat::Json => parse_json(&text),
    }
}

#[derive(serde::Deserialize, serde::Serialize)]
struct JsonGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_left: Option<usize>,
}

fn parse_json(text: &str) -> Result<BaseGraph, GraphError> {
    let j: JsonGraph = serde_json::from_str(text).map_err(|e| GraphError::Malformed {
        line: e.line(),
        msg: e.to_string(),
    })?;
    match j.n_left {
        Some(nl) if nl <= j.n => BaseGraph::bipartite(nl, j.n - nl, j.edges),
        Some(_) => Err(GraphError::Malformed {
            line: 1,
            msg: "n_left exceeds n".into(),
        }),
        None => BaseGraph::new(j.n, j.edges),
    }
}

/// Parses the edge-list text format. Errors carry 1-based file line numbers.
pub fn parse_edge_list(text: &str) -> Result<BaseGraph, GraphError> {
    let mut header: Option<(usize, Vec<usize>, bool)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut lines_of: Vec<usize> = Vec::new();
    let mut layers: Vec<(usize, u32)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(comment) = l.strip_prefix('#') {
            let f: Vec<&str> = comment.split_whitespace().collect();
            if f.len() == 3 && f[0] == "layer" {
                if let (Ok(v), Ok(i)) = (f[1].parse(), f[2].parse()) {
                    layers.push((v, i));
                }
            }
            continue;
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Malformed {
                line,
                msg: format!("expected a nonnegative integer, got {s:?}"),
            })
        };
        match &header {
            None => {
                header = Some(if f.first() == Some(&"bipartite") {
                    if f.len() != 4 {
                        return Err(GraphError::Malformed {
                            line,
                            msg: "expected `bipartite nL nR m`".into(),
                        });
                    }
                    (line, vec![num(f[1])?, num(f[2])?, num(f[3])?], true)
                } else {
                    if f.len() != 2 {
                        return Err(GraphError::Malformed {
                            line,
                            msg: "expected header `n m`".into(),
                        });
                    }
                    (line, vec![num(f[0])?, num(f[1])?], false)
                });
            }
            Some(_) => {
                if f.len() != 2 {
                    return Err(GraphError::Malformed {
                        line,
                        msg: "expected `u v`".into(),
                    });
                }
                edges.push((num(f[0])?, num(f[1])?));
                lines_of.push(line);
            }
        }
    }

    let (hline, h, bip) = header.ok_or(GraphError::Malformed {
        line: 1,
        msg: "missing header".into(),
    })?;
    let m = *h.last().unwrap();
    if edges.len() != m {
        return Err(GraphError::Malformed {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    let relabel = |e: GraphError| match e {
        GraphError::EndpointRange { line, vertex, n } => GraphError::EndpointRange {
            line: lines_of[line - 1],
            vertex,
            n,
        },
        GraphError::SelfLoop { line, vertex } => GraphError::SelfLoop {
            line: lines_of[line - 1],
            vertex,
        },
        GraphError::SideViolation { line, u, v } => GraphError::SideViolation {
            line: lines_of[line - 1],
            u,
            v,
        },
        other => other,
    };
    let g = if bip {
        BaseGraph::bipartite(h[0], h[1], edges).map_err(relabel)?
    } else {
        BaseGraph::new(h[0], edges).map_err(relabel)?
    };
    if layers.is_empty() {
        return Ok(g);
    }
    let mut lay = vec![0u32; g.vertex_count()];
    for (v, i) in layers {
        if v < lay.len() {
            lay[v] = i;
        }
    }
    Ok(g.with_layers(lay))
}

/// Writes the edge-list format; layer metadata as `# layer v i` lines.
pub fn write_edge_list<W: std::io::Write>(g: &BaseGraph, mut w: W) -> std::io::Result<()> {
    match g.sides() {
        Some(sides) if is_prefix_left(sides) => {
            let nl = sides.iter().filter(|s| **s == Side::Left).count();
            writeln!(
                w,
                "bipartite {} {} {}",
                nl,
                g.vertex_count() - nl,
                g.edge_count()
            )?;
        }
        _ => writeln!(w, "{} {}", g.vertex_count(), g.edge_count())?,
    }
    if let Some(layers) = g.layers() {
        for (v, l) in layers.iter().enumerate() {
            writeln!(w, "# layer {v} {l}")?;
        }
    }
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn write_json<W: std::io::Write>(g: &BaseGraph, w: W) -> Result<(), GraphError> {
    let n_left = g
        .sides()
        .filter(|s| is_prefix_left(s))
        .map(|s| s.iter().filter(|x| **x == Side::Left).count());
    let j = JsonGraph {
        n: g.vertex_count(),
        edges: g.edges().collect(),
        n_left,
    };
    serde_json::to_writer(w, &j).map_err(|e| GraphError::Io(e.to_string()))
}

fn is_prefix_left(sides: &[Side]) -> bool {
    sides
        .windows(2)
        .all(|w| !(w[0] == Side::Right && w[1] == Side::Left))
}

impl fmt::Display for BaseGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "graph(n={}, m={}{})",
            self.n,
            self.edge_count(),
            if self.is_bipartite() {
                ", bipartite"
            } else {
                ""
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_plain_edge_list() {
        let g = parse_edge_list("3 2\n0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(!g.is_bipartite());
    }

    #[test]
    fn parse_reports_endpoint_range_with_line() {
        let err = parse_edge_list("# c\n3 1\n0 5").unwrap_err();
        assert_eq!(
            err,
            GraphError::EndpointRange {
                line: 3,
                vertex: 5,
                n: 3
            }
        );
    }

    #[test]
    fn parse_reports_self_loop_and_malformed() {
        assert_eq!(
            parse_edge_list("3 1\n1 1").unwrap_err(),
            GraphError::SelfLoop { line: 2, vertex: 1 }
        );
        assert!(matches!(
            parse_edge_list("3 1\n1 x").unwrap_err(),
            GraphError::Malformed { line: 2, .. }
        ));
        assert!(matches!(
            parse_edge_list("3 2\n0 1").unwrap_err(),
            GraphError::Malformed { line: 1, .. }
        ));
    }

    #[test]
    fn bipartite_side_violation() {
        // vertices 0 and 1 are both Left
        let err = parse_edge_list("bipartite 2 1 1\n0 1").unwrap_err();
        assert_eq!(
            err,
            GraphError::SideViolation {
                line: 2,
                u: 0,
                v: 1
            }
        );
        let g = parse_edge_list("bipartite 2 1 2\n2 0\n1 2").unwrap();
        assert!(g.is_bipartite());
        assert_eq!(g.edge(0), (0, 2), "left endpoint first");
    }

    #[test]
    fn stats_examples() {
        let single = BaseGraph::new(2, vec![(0, 1)]).unwrap();
        let s = degree_stats(&single);
        assert_eq!(s.avg_degree, Rational::from_integer(1));
        assert_eq!(s.density, Rational::new(1, 2));

        let k4 = BaseGraph::complete_implicit(4);
        let s = degree_stats(&k4);
        assert_eq!(s.avg_degree, Rational::from_integer(3));
        assert_eq!(s.density, Rational::new(6, 4));

        let mut e = Vec::new();
        for a in 0..2 {
            for b in 0..4 {
                e.push((a, 2 + b));
            }
        }
        let k24 = BaseGraph::bipartite(2, 4, e).unwrap();
        let s = degree_stats(&k24);
        assert_eq!((s.max_left_degree, s.max_right_degree), (4, 2));
        assert_eq!(s.avg_degree, Rational::new(16, 6));

        let empty = BaseGraph::new(3, vec![]).unwrap();
        assert!(degree_stats(&empty).is_empty());
    }

    #[test]
    fn sampling_edge_cases() {
        let g = BaseGraph::new(2, vec![(0, 1)]).unwrap();
        assert!(sample_iid(&g, 0, 7).unwrap().is_empty());
        assert_eq!(sample_iid(&g, 5, 7).unwrap().arrivals, vec![0; 5]);
        let empty = BaseGraph::new(2, vec![]).unwrap();
        assert_eq!(
            sample_iid(&empty, 3, 1).unwrap_err(),
            GraphError::EmptySample(3)
        );
        assert!(sample_iid(&empty, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn sampling_is_uniform() {
        let g = BaseGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = sample_iid(&g, 1_000_000, 99).unwrap();
        let mut counts = [0usize; 4];
        for &e in &s.arrivals {
            counts[e] += 1;
        }
        for c in counts {
            let freq = c as f64 / 1e6;
            assert!((freq - 0.25).abs() <= 0.005, "{freq}");
        }
    }

    #[test]
    fn child_seeds_differ_and_repeat() {
        let a: Vec<u64> = (0..8).map(|i| child_seed(42, i)).collect();
        let b: Vec<u64> = (0..8).map(|i| child_seed(42, i)).collect();
        assert_eq!(a, b);
        let mut d = a.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 8);
    }

    #[test]
    fn component_examples() {
        let path = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert!(components(&path, &[]).is_empty());
        assert_eq!(components(&path, &[0, 1]), vec![3]);
        let two = BaseGraph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(components(&two, &[0, 1]), vec![2, 2]);
    }

    #[test]
    fn implicit_complete_ranking() {
        for n in 2..12 {
            let g = BaseGraph::complete_implicit(n);
            let mut expect = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    expect.push((u, v));
                }
            }
            let got: Vec<_> = g.edges().collect();
            assert_eq!(got, expect);
            for (e, &(u, v)) in expect.iter().enumerate() {
                assert_eq!(rank_pair(n, u, v), e);
            }
        }
        let n = 1 << 16;
        let m = n * (n - 1) / 2;
        for e in [0, 1, m / 3, m / 2, m - 2, m - 1] {
            let (u, v) = unrank_pair(n, e);
            assert!(u < v && v < n);
            assert_eq!(rank_pair(n, u, v), e);
        }
    }

    #[test]
    fn circulant_orientation_is_balanced() {
        for n in 2..15 {
            let g = BaseGraph::oriented_complete(n);
            let mut indeg = vec![0u64; n];
            for (head, tail) in g.edges() {
                assert!(head < n && tail >= n);
                indeg[head] += 1;
            }
            assert_eq!(*indeg.iter().max().unwrap(), (n as u64) / 2);
            let mut explicit = vec![0u64; 2 * n];
            for (a, b) in g.edges() {
                explicit[a] += 1;
                explicit[b] += 1;
            }
            assert_eq!(g.degrees(), explicit, "n={n}");
        }
    }

    #[test]
    fn edge_list_roundtrip_keeps_layers() {
        let g = BaseGraph::bipartite(2, 2, vec![(0, 2), (1, 3), (0, 3)])
            .unwrap()
            .with_layers(vec![1, 1, 2, 2]);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, g);
        let mut js = Vec::new();
        write_json(&g, &mut js).unwrap();
        let back = parse_json(std::str::from_utf8(&js).unwrap()).unwrap();
        assert_eq!(
            back.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
    }

    #[test]
    fn sample_text_roundtrip() {
        let g = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let s = sample_iid(&g, 10, 3).unwrap();
        let mut buf = Vec::new();
        s.write_to(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&format!("sample {} 10 3", g.content_hash())));
        assert_eq!(SampledStream::parse(&g, &text).unwrap(), s);
        let other = BaseGraph::new(3, vec![(0, 1)]).unwrap();
        assert!(SampledStream::parse(&other, &text).is_err());
    }
}
