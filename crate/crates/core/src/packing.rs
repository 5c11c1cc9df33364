//! Spanning tree packings built from multi-COBRA subgraphs.
//!
//! Every walk's subgraph gets a BFS from the source. The BFS searches run in
//! parallel in phases of `phase_len` rounds, one hop per phase; an edge lying
//! in `w` subgraphs carries at most one message per subgraph and direction
//! per hop, so `phase_len = max_e |edge_walks(e)|` slots suffice.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cobra::MultiCobraAssignment;
use crate::error::{Error, Result};
use crate::graph::{bfs, BfsTree, Graph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePacking {
    pub source: usize,
    pub trees: Vec<BfsTree>,
    /// S: number of trees.
    #[serde(rename = "S")]
    pub size: usize,
    /// H: largest tree diameter.
    #[serde(rename = "H")]
    pub diameter: usize,
    /// W: largest number of trees sharing one edge.
    #[serde(rename = "W")]
    pub weight: usize,
    pub build_rounds: usize,
    /// Rounds per BFS hop used when building; zero for hand-built packings.
    pub phase_len: usize,
    /// Largest depth over all trees.
    pub max_depth: usize,
}

impl TreePacking {
    /// Packing from explicit trees; S, H and W are measured.
    pub fn from_trees(source: usize, trees: Vec<BfsTree>) -> TreePacking {
        let diameter = trees.iter().map(BfsTree::diameter).max().unwrap_or(0);
        let max_depth = trees.iter().map(BfsTree::max_depth).max().unwrap_or(0);
        let weight = tree_edge_loads(&trees).into_values().max().unwrap_or(0);
        TreePacking {
            source,
            size: trees.len(),
            trees,
            diameter,
            weight,
            build_rounds: 0,
            phase_len: 0,
            max_depth,
        }
    }

    /// Tree ids using undirected edge `{u, v}`, ascending.
    pub fn trees_on_edge(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut on: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in self.trees.iter().enumerate() {
            for (p, c) in t.edges() {
                on.entry((p.min(c), p.max(c))).or_default().push(i);
            }
        }
        on
    }
}

fn tree_edge_loads(trees: &[BfsTree]) -> HashMap<(usize, usize), usize> {
    let mut loads = HashMap::new();
    for t in trees {
        for (p, c) in t.edges() {
            *loads.entry((p.min(c), p.max(c))).or_insert(0) += 1;
        }
    }
    loads
}

/// BFS tree of every walk's subgraph, with simulated build rounds.
pub fn build_tree_packing(
    g: &Graph,
    a: &MultiCobraAssignment,
    source: usize,
) -> Result<TreePacking> {
    let n = g.node_count();
    if a.node_count() != n || a.edge_count() != g.distinct_edge_count() {
        return Err(Error::invalid("assignment does not belong to this graph"));
    }
    if source != a.source() {
        return Err(Error::invalid(format!(
            "packing source {source} differs from walk source {}",
            a.source()
        )));
    }
    let mut trees = Vec::with_capacity(a.num_walks());
    let mut adjacencies = Vec::with_capacity(a.num_walks());
    for walk in 0..a.num_walks() {
        let adj = a.subgraph_adjacency(walk);
        let tree = bfs(&adj, source)?;
        if !tree.is_spanning() {
            return Err(Error::WalkNotCovering {
                walk,
                reached: tree.reached_count(),
                node_count: n,
            });
        }
        trees.push(tree);
        adjacencies.push(adj);
    }
    let phase_len = a.max_edge_weight().max(1);
    let hops = trees.iter().map(BfsTree::max_depth).max().unwrap_or(0);

    // Hop h: every node first reached at hop h-1 tells all its subgraph
    // neighbors. Count messages per directed edge and hop.
    let mut load = vec![0usize; g.directed_edge_count()];
    let mut stamp = vec![usize::MAX; g.directed_edge_count()];
    for h in 1..=hops {
        for (tree, adj) in trees.iter().zip(&adjacencies) {
            for layer_node in tree
                .depth
                .iter()
                .enumerate()
                .filter(|(_, d)| **d == Some(h - 1))
                .map(|(v, _)| v)
            {
                for &w in crate::graph::Topology::neighbors(adj, layer_node) {
                    let pos = g
                        .directed_index(layer_node, w as usize)
                        .expect("subgraph edge missing from graph");
                    if stamp[pos] != h {
                        stamp[pos] = h;
                        load[pos] = 0;
                    }
                    load[pos] += 1;
                    if load[pos] > phase_len {
                        return Err(Error::Oversubscribed {
                            u: layer_node,
                            v: w as usize,
                            phase: h,
                            load: load[pos],
                            capacity: phase_len,
                        });
                    }
                }
            }
        }
    }
    let mut packing = TreePacking::from_trees(source, trees);
    packing.phase_len = phase_len;
    packing.build_rounds = phase_len * hops;
    Ok(packing)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First counterexample on failure.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingReport {
    pub size: usize,
    pub diameter: usize,
    pub weight: usize,
    pub checks: Vec<PackingCheck>,
}

impl PackingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PackingCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Height-based tree diameter: longest path through each node is the sum of
/// its two tallest child subtrees.
fn diameter_by_heights(parent: &[Option<usize>], root: usize) -> usize {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(v);
        }
    }
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        order.extend(children[v].iter().copied());
        i += 1;
    }
    let mut height = vec![0usize; n];
    let mut best = 0;
    for &v in order.iter().rev() {
        let (mut a, mut b) = (0usize, 0usize);
        for &c in &children[v] {
            let h = height[c] + 1;
            if h > a {
                b = a;
                a = h;
            } else if h > b {
                b = h;
            }
        }
        height[v] = a;
        best = best.max(a + b);
    }
    best
}

/// Recomputes S, H, W and checks the structural properties from scratch.
pub fn verify_packing(tp: &TreePacking, g: &Graph) -> PackingReport {
    let n = g.node_count();
    let mut checks = Vec::new();
    let mut check = |name: &'static str, failure: Option<String>| {
        checks.push(PackingCheck {
            name,
            passed: failure.is_none(),
            detail: failure,
        });
    };

    let mut rooted = None;
    let mut spanning = None;
    let mut acyclic = None;
    let mut edge_count = None;
    let mut in_graph = None;
    let mut depths = None;
    let mut diameter = 0;
    let mut loads: HashMap<(usize, usize), usize> = HashMap::new();

    for (i, t) in tp.trees.iter().enumerate() {
        if t.parent.len() != n {
            spanning.get_or_insert(format!(
                "tree {i} has {} entries for {n} nodes",
                t.parent.len()
            ));
            continue;
        }
        if t.root != tp.source || t.parent[tp.source].is_some() {
            rooted.get_or_insert(format!("tree {i} rooted at {} not {}", t.root, tp.source));
        }
        let rebuilt = match BfsTree::from_parents(tp.source, t.parent.clone()) {
            Ok(r) => r,
            Err(e) => {
                acyclic.get_or_insert(format!("tree {i}: {e}"));
                continue;
            }
        };
        if let Some(v) = rebuilt.unreachable().first() {
            spanning.get_or_insert(format!("tree {i} misses node {v}"));
        }
        let edges = t.parent.iter().filter(|p| p.is_some()).count();
        if edges + 1 != n {
            edge_count.get_or_insert(format!("tree {i} has {edges} edges, expected {}", n - 1));
        }
        for (p, c) in rebuilt.edges() {
            if g.multiplicity(p, c) == 0 {
                in_graph.get_or_insert(format!("tree {i} edge ({p}, {c}) not in graph"));
            }
            *loads.entry((p.min(c), p.max(c))).or_insert(0) += 1;
        }
        if rebuilt.depth != t.depth {
            let v = (0..n)
                .find(|&v| rebuilt.depth[v] != t.depth[v])
                .unwrap_or(0);
            depths.get_or_insert(format!(
                "tree {i} stores depth {:?} at node {v}",
                t.depth[v]
            ));
        }
        diameter = diameter.max(diameter_by_heights(&t.parent, tp.source));
    }
    let weight = loads.values().copied().max().unwrap_or(0);
    let size = tp.trees.len();

    check("root is source", rooted);
    check("trees span all nodes", spanning);
    check("parent pointers acyclic", acyclic);
    check("n - 1 edges per tree", edge_count);
    check("tree edges exist in graph", in_graph);
    check("depths consistent", depths);
    let mismatch = |what: &str, stored: usize, measured: usize| {
        (stored != measured).then(|| format!("{what} stored {stored}, measured {measured}"))
    };
    check("S matches", mismatch("S", tp.size, size));
    check("H matches", mismatch("H", tp.diameter, diameter));
    check("W matches", mismatch("W", tp.weight, weight));

    PackingReport {
        size,
        diameter,
        weight,
        checks,
    }
}
