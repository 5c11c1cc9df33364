//! Undirected multigraphs with self-loop counters.
//!
//! Adjacency is stored in compressed sparse rows: each node's distinct
//! neighbors are sorted, and a parallel array carries the edge multiplicity.
//! Self-loops are kept as per-node counters rather than adjacency entries, so
//! regularization never disturbs the neighbor lists. Every distinct neighbor
//! pair also gets an undirected edge id, which downstream stages use to attach
//! per-edge data (walk memberships, tree loads).

mod bfs;
mod generators;

pub use bfs::{bfs, bitset_diameter, diameter, distances, eccentricity, BfsTree};
pub use generators::{
    barbell, circulant, complete, cycle, erdos_renyi, path, random_tree, ring_of_cliques, star,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Anything BFS can walk: nodes `0..node_count` with sorted, distinct neighbor
/// lists.
pub trait Topology {
    fn node_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[u32];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    multiplicity: Vec<u32>,
    edge_of_slot: Vec<u32>,
    tails: Vec<u32>,
    edges: Vec<(u32, u32)>,
    edge_multiplicity: Vec<u32>,
    self_loops: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    /// `max / min`; absent when the minimum degree is zero.
    pub ratio: Option<f64>,
}

impl Graph {
    /// Builds a graph from undirected edge pairs. Repeated pairs raise the
    /// multiplicity; a pair `(v, v)` adds one self-loop to `v`.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        if node_count > u32::MAX as usize {
            return Err(Error::invalid("node count exceeds u32 range"));
        }
        let mut self_loops = vec![0u32; node_count];
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                self_loops[u] += 1;
            } else {
                pairs.push((u.min(v) as u32, u.max(v) as u32));
            }
        }
        pairs.sort_unstable();
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        let mut edge_multiplicity: Vec<u32> = Vec::with_capacity(pairs.len());
        for pair in pairs {
            if edges.last() == Some(&pair) {
                *edge_multiplicity.last_mut().unwrap() += 1;
            } else {
                edges.push(pair);
                edge_multiplicity.push(1);
            }
        }
        Ok(Self::assemble(
            node_count,
            edges,
            edge_multiplicity,
            self_loops,
        ))
    }

    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize) -> Result<Graph> {
        Graph::from_edges(node_count, std::iter::empty())
    }

    fn assemble(
        node_count: usize,
        edges: Vec<(u32, u32)>,
        edge_multiplicity: Vec<u32>,
        self_loops: Vec<u32>,
    ) -> Graph {
        let mut counts = vec![0usize; node_count];
        for &(u, v) in &edges {
            counts[u as usize] += 1;
            counts[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let total = *offsets.last().unwrap();
        let mut targets = vec![0u32; total];
        let mut multiplicity = vec![0u32; total];
        let mut edge_of_slot = vec![0u32; total];
        let mut tails = vec![0u32; total];
        let mut cursor = offsets[..node_count].to_vec();
        // Edges are sorted by (u, v) with u < v: row w receives its smaller
        // neighbors first (ascending), then its larger ones (ascending).
        for (id, &(u, v)) in edges.iter().enumerate() {
            for (a, b) in [(u, v), (v, u)] {
                let slot = cursor[a as usize];
                cursor[a as usize] += 1;
                targets[slot] = b;
                multiplicity[slot] = edge_multiplicity[id];
                edge_of_slot[slot] = id as u32;
                tails[slot] = a;
            }
        }
        debug_assert!((0..node_count).all(|v| targets[offsets[v]..offsets[v + 1]]
            .windows(2)
            .all(|w| w[0] < w[1])));
        Graph {
            offsets,
            targets,
            multiplicity,
            edge_of_slot,
            tails,
            edges,
            edge_multiplicity,
            self_loops,
        }
    }

    pub fn node_count(&self) -> usize {
        self.self_loops.len()
    }

    /// Number of non-loop edges, counting multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edge_multiplicity.iter().map(|&m| m as usize).sum()
    }

    /// Number of distinct neighbor pairs (undirected edge ids).
    pub fn distinct_edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of directed adjacency entries (two per distinct pair).
    pub fn directed_edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn neighbor_multiplicities(&self, v: usize) -> &[u32] {
        &self.multiplicity[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbor, multiplicity)` pairs in ascending neighbor order.
    pub fn adjacency(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.neighbors(v)
            .iter()
            .zip(self.neighbor_multiplicities(v))
            .map(|(&t, &m)| (t as usize, m))
    }

    /// Range of directed-edge positions owned by `v`.
    pub fn directed_range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// `(tail, head)` of a directed-edge position.
    pub fn directed_endpoints(&self, pos: usize) -> (usize, usize) {
        (self.tails[pos] as usize, self.targets[pos] as usize)
    }

    /// Undirected edge id of a directed-edge position.
    pub fn edge_of_directed(&self, pos: usize) -> usize {
        self.edge_of_slot[pos] as usize
    }

    /// Position of the directed edge `u -> v`.
    pub fn directed_index(&self, u: usize, v: usize) -> Option<usize> {
        let row = self.neighbors(u);
        row.binary_search(&(v as u32))
            .ok()
            .map(|i| self.offsets[u] + i)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.directed_index(u, v)
            .map(|p| self.edge_of_slot[p] as usize)
    }

    pub fn edge_endpoints(&self, edge: usize) -> (usize, usize) {
        let (u, v) = self.edges[edge];
        (u as usize, v as usize)
    }

    pub fn edge_multiplicity(&self, edge: usize) -> u32 {
        self.edge_multiplicity[edge]
    }

    /// `(u, v, multiplicity)` with `u < v`, in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges
            .iter()
            .zip(&self.edge_multiplicity)
            .map(|(&(u, v), &m)| (u as usize, v as usize, m))
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.directed_index(u, v)
            .map(|p| self.multiplicity[p])
            .unwrap_or(0)
    }

    /// Non-loop degree, counting multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.neighbor_multiplicities(v)
            .iter()
            .map(|&m| m as usize)
            .sum()
    }

    pub fn self_loops(&self, v: usize) -> usize {
        self.self_loops[v] as usize
    }

    pub fn has_self_loops(&self) -> bool {
        self.self_loops.iter().any(|&c| c > 0)
    }

    /// Outgoing slots of `v`: its degree plus one per self-loop.
    pub fn slot_count(&self, v: usize) -> usize {
        self.degree(v) + self.self_loops(v)
    }

    /// Total slot count over all nodes (the volume of the graph).
    pub fn volume(&self) -> usize {
        (0..self.node_count()).map(|v| self.slot_count(v)).sum()
    }

    pub fn is_simple(&self) -> bool {
        !self.has_self_loops() && self.edge_multiplicity.iter().all(|&m| m == 1)
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let (min, max) = (0..self.node_count())
            .map(|v| self.degree(v))
            .fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
        DegreeStats {
            min,
            max,
            ratio: (min > 0).then(|| max as f64 / min as f64),
        }
    }

    /// Minimum and maximum slot count.
    pub fn slot_range(&self) -> (usize, usize) {
        (0..self.node_count())
            .map(|v| self.slot_count(v))
            .fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    pub fn is_connected(&self) -> bool {
        bfs(self, 0).map(|t| t.is_spanning()).unwrap_or(false)
    }

    /// Copy of `self` where every node carries `Δ - deg(v)` self-loops, so all
    /// slot counts equal Δ. The neighbor lists are untouched.
    pub fn regularize(&self) -> Result<Graph> {
        if self.has_self_loops() {
            return Err(Error::HasSelfLoops);
        }
        let max = self.degree_stats().max;
        let mut out = self.clone();
        for v in 0..self.node_count() {
            out.self_loops[v] = (max - self.degree(v)) as u32;
        }
        Ok(out)
    }

    /// Copy of `self` with the given self-loop counts.
    pub fn with_self_loops(&self, loops: Vec<u32>) -> Result<Graph> {
        if loops.len() != self.node_count() {
            return Err(Error::invalid(
                "self-loop vector length differs from node count",
            ));
        }
        let mut out = self.clone();
        out.self_loops = loops;
        Ok(out)
    }

    /// Subgraph on all nodes keeping only the listed undirected edge ids.
    pub fn edge_subgraph(&self, edge_ids: impl IntoIterator<Item = usize>) -> Csr {
        Csr::from_edges(
            self.node_count(),
            edge_ids.into_iter().map(|e| self.edge_endpoints(e)),
        )
    }
}

impl Topology for Graph {
    fn node_count(&self) -> usize {
        Graph::node_count(self)
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        Graph::neighbors(self, v)
    }
}

/// Plain simple adjacency used for subgraphs and trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// Builds a simple undirected adjacency; duplicates and loops are dropped.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Csr {
        let mut directed: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u != v {
                directed.push((u as u32, v as u32));
                directed.push((v as u32, u as u32));
            }
        }
        directed.sort_unstable();
        directed.dedup();
        let mut offsets = vec![0usize; node_count + 1];
        for &(u, _) in &directed {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: directed.into_iter().map(|(_, v)| v).collect(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

impl Topology for Csr {
    fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multigraph_counts() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 2)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.distinct_edge_count(), 2);
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.multiplicity(1, 0), 2);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.self_loops(2), 1);
        assert_eq!(g.slot_count(2), 2);
        assert!(!g.is_simple());
    }

    #[test]
    fn rows_are_sorted_and_directed_positions_consistent() {
        let g = Graph::from_edges(5, [(4, 0), (2, 0), (3, 1), (0, 1), (4, 3)]).unwrap();
        for v in 0..5 {
            let row = g.neighbors(v);
            assert!(row.windows(2).all(|w| w[0] < w[1]));
            for pos in g.directed_range(v) {
                let (t, h) = g.directed_endpoints(pos);
                assert_eq!(t, v);
                assert_eq!(g.directed_index(t, h), Some(pos));
                let (a, b) = g.edge_endpoints(g.edge_of_directed(pos));
                assert_eq!((a.min(b), a.max(b)), (t.min(h), t.max(h)));
            }
        }
    }

    #[test]
    fn regularize_star() {
        let g = star(4).unwrap();
        let r = g.regularize().unwrap();
        assert_eq!(r.self_loops(0), 0);
        for leaf in 1..=4 {
            assert_eq!(r.self_loops(leaf), 3);
        }
        assert_eq!(r.slot_range(), (4, 4));
        assert_eq!(r.neighbors(0), g.neighbors(0));
    }

    #[test]
    fn regularize_cycle_adds_nothing() {
        let r = cycle(6).unwrap().regularize().unwrap();
        assert!(!r.has_self_loops());
    }

    #[test]
    fn regularize_rejects_existing_loops() {
        let g = Graph::from_edges(2, [(0, 1), (0, 0)]).unwrap();
        assert!(matches!(g.regularize(), Err(Error::HasSelfLoops)));
    }

    #[test]
    fn degree_stats_examples() {
        let k4 = complete(4).unwrap().degree_stats();
        assert_eq!((k4.min, k4.max, k4.ratio), (3, 3, Some(1.0)));
        let p3 = path(3).unwrap().degree_stats();
        assert_eq!((p3.min, p3.max, p3.ratio), (1, 2, Some(2.0)));
        let empty = Graph::empty(5).unwrap().degree_stats();
        assert_eq!((empty.min, empty.max, empty.ratio), (0, 0, None));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { node: 2, .. })
        ));
    }
}
