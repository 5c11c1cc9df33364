//! Lower-bound and NP-hardness gadgets with exact small-instance oracles.
//!
//! Graphs here carry integer bandwidths: an edge of bandwidth `b` moves up to
//! `b` messages per direction per round.

pub mod flow;
mod layered;
mod saturation;
mod setsplit;
mod sqrtk;

use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bitset_diameter, distances, Graph};
use flow::global_min_cut;

pub use layered::{layered_transform, simulate_translated_schedule, LayeredGadget};
pub use saturation::{check_certificate, flow_within, time_expanded_saturation, SaturationResult};
pub use setsplit::{
    brute_force_set_splitting, build_setsplit_reduction, decide_saturation_round4, random_instance,
    simulate_layered_schedule, split_schedule, LayeredSchedule, ReductionInstance,
    SetSplitReduction, SplitDecision,
};
pub use sqrtk::{build_sqrtk_instance, SqrtKInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandwidthGraph {
    pub node_count: usize,
    pub edges: Vec<(usize, usize, u64)>,
    pub source: usize,
}

impl BandwidthGraph {
    pub fn new(node_count: usize, edges: Vec<(usize, usize, u64)>, source: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::invalid("bandwidth graph needs at least one node"));
        }
        if source >= node_count {
            return Err(Error::NodeOutOfRange {
                node: source,
                node_count,
            });
        }
        let mut seen = HashSet::new();
        for &(u, v, b) in &edges {
            for x in [u, v] {
                if x >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: x,
                        node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            if b == 0 {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has zero bandwidth"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("edge ({u}, {v}) repeated")));
            }
        }
        Ok(BandwidthGraph {
            node_count,
            edges,
            source,
        })
    }

    /// The underlying unweighted graph.
    pub fn topology(&self) -> Result<Graph> {
        Graph::from_edges(self.node_count, self.edges.iter().map(|&(u, v, _)| (u, v)))
    }

    /// Largest bandwidth on an edge at `v`, 0 if isolated.
    pub fn max_bandwidth(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|&&(a, b, _)| a == v || b == v)
            .map(|e| e.2)
            .max()
            .unwrap_or(0)
    }

    pub fn bandwidth(&self, u: usize, v: usize) -> Option<u64> {
        self.edges
            .iter()
            .find(|&&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u))
            .map(|e| e.2)
    }

    /// Hop distance of each node from the source.
    pub fn layers(&self) -> Result<Vec<usize>> {
        let d = distances(&self.topology()?, self.source);
        if let Some(v) = d.iter().position(|&x| x == u32::MAX) {
            return Err(Error::Disconnected {
                root: self.source,
                unreachable: v,
            });
        }
        Ok(d.into_iter().map(|x| x as usize).collect())
    }

    pub fn diameter(&self) -> Result<usize> {
        bitset_diameter(&self.topology()?)
    }

    pub fn capacities(&self) -> Vec<(usize, usize, i64)> {
        self.edges
            .iter()
            .map(|&(u, v, b)| (u, v, b as i64))
            .collect()
    }

    pub fn min_cut(&self) -> i64 {
        global_min_cut(self.node_count, &self.capacities())
    }
}

/// Unit-bandwidth graph built by replacing every node with a clique.
#[derive(Debug, Clone)]
pub struct CongestGadget {
    pub graph: Graph,
    /// Node ids of each original node's clique; the source's has one member.
    pub cliques: Vec<Range<usize>>,
}

impl CongestGadget {
    pub fn source(&self, bg: &BandwidthGraph) -> usize {
        self.cliques[bg.source].start
    }
}

/// Every node but the source becomes a clique on as many nodes as its widest
/// edge; an edge of bandwidth `b` becomes a matching on the lowest-id `b`
/// members of both cliques.
pub fn bandwidth_to_congest(bg: &BandwidthGraph) -> Result<CongestGadget> {
    if !bg.topology()?.is_connected() {
        return Err(Error::invalid("bandwidth graph must be connected"));
    }
    let mut cliques = Vec::with_capacity(bg.node_count);
    let mut next = 0;
    for v in 0..bg.node_count {
        let size = if v == bg.source {
            1
        } else {
            bg.max_bandwidth(v).max(1) as usize
        };
        cliques.push(next..next + size);
        next += size;
    }
    let mut edges = Vec::new();
    for (v, c) in cliques.iter().enumerate() {
        if v != bg.source {
            for a in c.clone() {
                for b in a + 1..c.end {
                    edges.push((a, b));
                }
            }
        }
    }
    for &(u, v, b) in &bg.edges {
        let b = b as usize;
        for (x, y) in [(u, v), (v, u)] {
            if x != bg.source && cliques[x].len() < b {
                return Err(Error::invalid(format!(
                    "edge ({x}, {y}) wider than the {x}-clique"
                )));
            }
        }
        if u == bg.source || v == bg.source {
            let other = if u == bg.source { v } else { u };
            let s = cliques[bg.source].start;
            edges.extend(cliques[other].clone().take(b).map(|w| (s, w)));
        } else {
            edges.extend(cliques[u].clone().zip(cliques[v].clone()).take(b));
        }
    }
    Ok(CongestGadget {
        graph: Graph::from_edges(next, edges)?,
        cliques,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinCutSandwich {
    pub min_cut_original: i64,
    pub min_cut_congest: i64,
    /// Smallest non-source clique size minus one.
    pub min_clique_cut: i64,
}

impl MinCutSandwich {
    pub fn lower(&self) -> i64 {
        self.min_cut_original.min(self.min_clique_cut)
    }

    pub fn holds(&self) -> bool {
        self.lower() <= self.min_cut_congest && self.min_cut_congest <= self.min_cut_original
    }
}

/// Global min cuts of both graphs, with bandwidths as capacities on `bg`.
pub fn verify_mincut_sandwich(bg: &BandwidthGraph, gadget: &CongestGadget) -> MinCutSandwich {
    let unit: Vec<(usize, usize, i64)> = gadget
        .graph
        .edges()
        .map(|(u, v, m)| (u, v, m as i64))
        .collect();
    let min_clique_cut = gadget
        .cliques
        .iter()
        .enumerate()
        .filter(|&(v, _)| v != bg.source)
        .map(|(_, c)| c.len() as i64 - 1)
        .min()
        .unwrap_or(i64::MAX);
    MinCutSandwich {
        min_cut_original: bg.min_cut(),
        min_cut_congest: global_min_cut(gadget.graph.node_count(), &unit),
        min_clique_cut,
    }
}

/// A connected random instance for property checks: a random tree plus extra
/// edges, bandwidths in `1..=max_bandwidth`.
pub fn random_bandwidth_graph(
    n: usize,
    extra_edge_p: f64,
    max_bandwidth: u64,
    seed: crate::RngSeed,
) -> Result<BandwidthGraph> {
    use rand::Rng;
    if n < 2 || max_bandwidth == 0 {
        return Err(Error::invalid("need n >= 2 and a positive bandwidth cap"));
    }
    let mut rng = seed.rng();
    let mut pairs = HashSet::new();
    for v in 1..n {
        pairs.insert((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(extra_edge_p) {
                pairs.insert((u, v));
            }
        }
    }
    let mut pairs: Vec<_> = pairs.into_iter().collect();
    pairs.sort_unstable();
    let edges = pairs
        .into_iter()
        .map(|(u, v)| (u, v, rng.random_range(1..=max_bandwidth)))
        .collect();
    BandwidthGraph::new(n, edges, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RngSeed;

    #[test]
    fn single_edge_gadget() {
        let bg = BandwidthGraph::new(2, vec![(0, 1, 3)], 0).unwrap();
        let g = bandwidth_to_congest(&bg).unwrap();
        assert_eq!(g.graph.node_count(), 4);
        assert_eq!(g.graph.degree(0), 3);
        assert_eq!(g.graph.edge_count(), 6);
        let s = verify_mincut_sandwich(&bg, &g);
        assert_eq!((s.min_cut_original, s.min_cut_congest), (3, 3));
        assert!(s.holds());
    }

    #[test]
    fn unit_triangle_is_unchanged() {
        let bg = BandwidthGraph::new(3, vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)], 0).unwrap();
        let g = bandwidth_to_congest(&bg).unwrap();
        assert_eq!(g.graph, bg.topology().unwrap());
    }

    #[test]
    fn path_sandwich() {
        let bg = BandwidthGraph::new(3, vec![(0, 1, 2), (1, 2, 5)], 0).unwrap();
        let g = bandwidth_to_congest(&bg).unwrap();
        let s = verify_mincut_sandwich(&bg, &g);
        assert!(s.holds(), "{s:?}");
        assert_eq!(s.min_cut_original, 2);
    }

    #[test]
    fn random_instances_respect_diameter_and_cut_bounds() {
        for seed in 0..100 {
            let bg = random_bandwidth_graph(6, 0.3, 4, RngSeed(seed)).unwrap();
            let g = bandwidth_to_congest(&bg).unwrap();
            let (d, dp) = (bg.diameter().unwrap(), bitset_diameter(&g.graph).unwrap());
            assert!(d <= dp && dp <= 2 * d + 1, "seed {seed}: {d} {dp}");
            assert!(verify_mincut_sandwich(&bg, &g).holds(), "seed {seed}");
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(BandwidthGraph::new(2, vec![(0, 1, 0)], 0).is_err());
        assert!(BandwidthGraph::new(2, vec![(0, 0, 1)], 0).is_err());
        assert!(BandwidthGraph::new(2, vec![(0, 1, 1), (1, 0, 2)], 0).is_err());
    }
}
