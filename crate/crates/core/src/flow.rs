//! Exact integer max-flow (Dinic: BFS level graph plus blocking flow).

use std::collections::VecDeque;

pub type Cap = i64;

/// Effectively unbounded capacity; sums of a few of these still fit in `i64`.
pub const INF_CAP: Cap = 1 << 60;

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<Cap>,
    next: Vec<usize>,
    // built by `finish`
    adj_start: Vec<usize>,
    adj: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![NIL; nodes],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            adj_start: Vec::new(),
            adj: Vec::new(),
        }
    }

    pub fn with_capacity(nodes: usize, arcs: usize) -> Self {
        let mut net = Self::new(nodes);
        net.to.reserve(2 * arcs);
        net.cap.reserve(2 * arcs);
        net.next.reserve(2 * arcs);
        net
    }

    pub fn node_count(&self) -> usize {
        self.head.len()
    }

    /// Adds arc `u -> v` with capacity `c`; returns its id. The reverse arc is
    /// `id ^ 1`.
    pub fn add_arc(&mut self, u: usize, v: usize, c: Cap) -> usize {
        debug_assert!(c >= 0);
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.next.push(self.head[u]);
        self.head[u] = id;
        self.to.push(u);
        self.cap.push(0);
        self.next.push(self.head[v]);
        self.head[v] = id + 1;
        self.adj_start.clear();
        id
    }

    /// Flow currently pushed through arc `id` (its reverse residual).
    pub fn flow_on(&self, id: usize) -> Cap {
        self.cap[id ^ 1]
    }

    pub fn residual(&self, id: usize) -> Cap {
        self.cap[id]
    }

    fn build_adjacency(&mut self) {
        if !self.adj_start.is_empty() {
            return;
        }
        let n = self.head.len();
        let mut start = vec![0usize; n + 1];
        for (u, &h) in self.head.iter().enumerate() {
            let mut a = h;
            while a != NIL {
                start[u + 1] += 1;
                a = self.next[a];
            }
        }
        for u in 0..n {
            start[u + 1] += start[u];
        }
        let mut adj = vec![0usize; start[n]];
        for u in 0..n {
            let mut a = self.head[u];
            let mut k = start[u];
            while a != NIL {
                adj[k] = a;
                k += 1;
                a = self.next[a];
            }
            // insertion order, so results do not depend on list reversal
            adj[start[u]..k].reverse();
        }
        self.adj_start = start;
        self.adj = adj;
    }

    /// Maximum flow from `s` to `t`. May be called again after adding arcs or
    /// raising capacities; it augments the existing flow.
    pub fn max_flow(&mut self, s: usize, t: usize) -> Cap {
        assert_ne!(s, t);
        self.build_adjacency();
        let n = self.head.len();
        let mut level = vec![u32::MAX; n];
        let mut iter = vec![0usize; n];
        let mut queue = VecDeque::with_capacity(n);
        let mut total: Cap = 0;
        let mut stack: Vec<usize> = Vec::new();

        loop {
            // level graph
            level.iter_mut().for_each(|l| *l = u32::MAX);
            level[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &a in &self.adj[self.adj_start[u]..self.adj_start[u + 1]] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && level[v] == u32::MAX {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if level[t] == u32::MAX {
                return total;
            }
            for (u, it) in iter.iter_mut().enumerate() {
                *it = self.adj_start[u];
            }

            // blocking flow by iterative DFS; `stack` holds the arcs of the
            // current path
            loop {
                stack.clear();
                let mut u = s;
                let pushed = loop {
                    if u == t {
                        let bottleneck = stack.iter().map(|&a| self.cap[a]).min().unwrap();
                        for &a in &stack {
                            self.cap[a] -= bottleneck;
                            self.cap[a ^ 1] += bottleneck;
                        }
                        break Some(bottleneck);
                    }
                    let end = self.adj_start[u + 1];
                    let mut advanced = false;
                    while iter[u] < end {
                        let a = self.adj[iter[u]];
                        let v = self.to[a];
                        if self.cap[a] > 0 && level[v] == level[u] + 1 {
                            stack.push(a);
                            u = v;
                            advanced = true;
                            break;
                        }
                        iter[u] += 1;
                    }
                    if advanced {
                        continue;
                    }
                    // dead end: retreat
                    if u == s {
                        break None;
                    }
                    level[u] = u32::MAX;
                    let a = stack.pop().unwrap();
                    u = self.to[a ^ 1];
                    iter[u] += 1;
                };
                match pushed {
                    Some(f) => total += f,
                    None => break,
                }
            }
        }
    }

    /// Nodes reachable from `s` in the residual network (source side of a
    /// minimum cut after `max_flow`).
    pub fn source_side(&mut self, s: usize) -> Vec<bool> {
        self.build_adjacency();
        let n = self.head.len();
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[self.adj_start[u]..self.adj_start[u + 1]] {
                let v = self.to[a];
                if self.cap[a] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}
