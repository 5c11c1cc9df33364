//! Exact integer max-flow by capacity scaling.

use std::collections::VecDeque;

pub const INFINITE: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    flow: i64,
}

/// Directed network; arc `2i` is the i-th added arc and `2i + 1` its residual
/// twin.
#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> FlowNetwork {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    /// Adds `from -> to` and returns its arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, flow: 0 });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            flow: 0,
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id / 2
    }

    /// Both directions with capacity `cap` each.
    pub fn add_undirected(&mut self, u: usize, v: usize, cap: i64) {
        self.add_arc(u, v, cap);
        self.add_arc(v, u, cap);
    }

    pub fn flow_on(&self, arc: usize) -> i64 {
        self.arcs[2 * arc].flow
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len() / 2
    }

    pub fn reset(&mut self) {
        for a in &mut self.arcs {
            a.flow = 0;
        }
    }

    fn residual(&self, id: usize) -> i64 {
        self.arcs[id].cap - self.arcs[id].flow
    }

    /// BFS for an augmenting path whose arcs all have residual `>= delta`;
    /// returns the arc ids from `s` to `t`.
    fn find_path(&self, s: usize, t: usize, delta: i64) -> Option<Vec<usize>> {
        let mut via = vec![usize::MAX; self.node_count()];
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &id in &self.out[u] {
                let v = self.arcs[id].to;
                if !seen[v] && self.residual(id) >= delta {
                    seen[v] = true;
                    via[v] = id;
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let id = via[v];
            path.push(id);
            v = self.arcs[id ^ 1].to;
        }
        Some(path)
    }

    /// Maximum `s -> t` flow, stopping early once `limit` is reached.
    pub fn max_flow_limited(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        if s == t {
            return limit;
        }
        let max_cap = self
            .arcs
            .iter()
            .map(|a| a.cap)
            .max()
            .unwrap_or(0)
            .min(limit.max(1));
        let mut delta = 1i64;
        while delta * 2 <= max_cap {
            delta *= 2;
        }
        let mut total = 0;
        while delta >= 1 && total < limit {
            while let Some(path) = self.find_path(s, t, delta) {
                let push = path
                    .iter()
                    .map(|&id| self.residual(id))
                    .min()
                    .unwrap()
                    .min(limit - total);
                for &id in &path {
                    self.arcs[id].flow += push;
                    self.arcs[id ^ 1].flow -= push;
                }
                total += push;
                if total >= limit {
                    break;
                }
            }
            delta /= 2;
        }
        total
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        self.max_flow_limited(s, t, INFINITE)
    }
}

/// `s -> t` max-flow over undirected capacities.
pub fn undirected_max_flow(n: usize, edges: &[(usize, usize, i64)], s: usize, t: usize) -> i64 {
    let mut net = FlowNetwork::new(n);
    for &(u, v, c) in edges {
        net.add_undirected(u, v, c);
    }
    net.max_flow(s, t)
}

/// Global min cut: the best `0 - t` cut over all `t`.
pub fn global_min_cut(n: usize, edges: &[(usize, usize, i64)]) -> i64 {
    (1..n)
        .map(|t| undirected_max_flow(n, edges, 0, t))
        .min()
        .unwrap_or(0)
}
