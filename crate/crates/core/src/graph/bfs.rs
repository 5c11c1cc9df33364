use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Csr, Graph, Topology};
use crate::error::{Error, Result};

const UNREACHED: u32 = u32::MAX;

/// Rooted tree given by parent pointers, with per-node depth.
///
/// Unreachable nodes have neither parent nor depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<Option<usize>>,
}

impl BfsTree {
    /// Rebuilds depths from a parent array and checks it is a forest rooted at
    /// `root` (no cycles, root has no parent).
    pub fn from_parents(root: usize, parent: Vec<Option<usize>>) -> Result<BfsTree> {
        let n = parent.len();
        if root >= n {
            return Err(Error::NodeOutOfRange {
                node: root,
                node_count: n,
            });
        }
        if parent[root].is_some() {
            return Err(Error::invalid("root must not have a parent"));
        }
        let mut depth: Vec<Option<usize>> = vec![None; n];
        depth[root] = Some(0);
        let mut chain = Vec::new();
        for start in 0..n {
            if depth[start].is_some() || parent[start].is_none() {
                continue;
            }
            chain.clear();
            let mut v = start;
            let base = loop {
                if let Some(d) = depth[v] {
                    break Some(d);
                }
                if chain.len() > n {
                    return Err(Error::invalid(format!("parent cycle through node {start}")));
                }
                chain.push(v);
                match parent[v] {
                    Some(p) if p < n => v = p,
                    Some(p) => {
                        return Err(Error::NodeOutOfRange {
                            node: p,
                            node_count: n,
                        })
                    }
                    None => break None,
                }
            };
            // Chains ending at a parentless non-root node stay unreached.
            if let Some(d) = base {
                for (i, &w) in chain.iter().rev().enumerate() {
                    depth[w] = Some(d + i + 1);
                }
            }
        }
        Ok(BfsTree {
            root,
            parent,
            depth,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn reached_count(&self) -> usize {
        self.depth.iter().filter(|d| d.is_some()).count()
    }

    pub fn is_spanning(&self) -> bool {
        self.depth.iter().all(Option::is_some)
    }

    pub fn unreachable(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| self.depth[v].is_none())
            .collect()
    }

    /// Largest depth, i.e. the eccentricity of the root in the tree.
    pub fn max_depth(&self) -> usize {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Tree edges as `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.node_count()];
        for (p, v) in self.edges() {
            children[p].push(v);
        }
        children
    }

    /// Reached nodes grouped by depth.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers = vec![Vec::new(); self.max_depth() + 1];
        for (v, d) in self.depth.iter().enumerate() {
            if let Some(d) = d {
                layers[*d].push(v);
            }
        }
        layers
    }

    /// Exact diameter of the reached part, by two sweeps over the tree.
    pub fn diameter(&self) -> usize {
        let adjacency = Csr::from_edges(self.node_count(), self.edges());
        let first = distances(&adjacency, self.root);
        let far = farthest(&first);
        let second = distances(&adjacency, far);
        second
            .iter()
            .filter(|&&d| d != UNREACHED)
            .copied()
            .max()
            .unwrap_or(0) as usize
    }
}

fn farthest(dist: &[u32]) -> usize {
    let mut best = 0;
    for (v, &d) in dist.iter().enumerate() {
        if d != UNREACHED && d > dist[best] {
            best = v;
        }
    }
    best
}

/// Hop distances from `root`; `u32::MAX` marks unreachable nodes.
pub fn distances<T: Topology + ?Sized>(g: &T, root: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.node_count()];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in g.neighbors(u) {
            let v = v as usize;
            if dist[v] == UNREACHED {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// BFS tree from `root`. Each node's parent is its smallest-id neighbor one
/// layer closer to the root. Unreachable nodes are left without depth.
pub fn bfs<T: Topology + ?Sized>(g: &T, root: usize) -> Result<BfsTree> {
    let n = g.node_count();
    if root >= n {
        return Err(Error::NodeOutOfRange {
            node: root,
            node_count: n,
        });
    }
    let dist = distances(g, root);
    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    for v in 0..n {
        if dist[v] == UNREACHED {
            continue;
        }
        depth[v] = Some(dist[v] as usize);
        if v != root {
            // Rows are sorted, so the first hit is the smallest id.
            parent[v] = g
                .neighbors(v)
                .iter()
                .map(|&u| u as usize)
                .find(|&u| dist[u] + 1 == dist[v]);
        }
    }
    Ok(BfsTree {
        root,
        parent,
        depth,
    })
}

/// Eccentricity of `v`; errors if some node is unreachable.
pub fn eccentricity<T: Topology + ?Sized>(g: &T, v: usize) -> Result<usize> {
    let dist = distances(g, v);
    let unreachable = dist.iter().filter(|&&d| d == UNREACHED).count();
    if unreachable > 0 {
        return Err(Error::Disconnected {
            root: v,
            unreachable,
        });
    }
    Ok(dist.into_iter().max().unwrap_or(0) as usize)
}

/// Exact diameter of a connected graph.
pub fn diameter(g: &Graph) -> Result<usize> {
    bitset_diameter(g)
}

/// Exact diameter by running all n BFS searches at once: `reach[v]` is the
/// bitset of sources within distance `r` of `v`, and one sweep over the
/// adjacency extends every search by one hop. Costs `(D + 1)·|E|·n/64` word
/// operations.
pub fn bitset_diameter<T: Topology + ?Sized>(g: &T) -> Result<usize> {
    let n = g.node_count();
    if n <= 1 {
        return Ok(0);
    }
    let words = n.div_ceil(64);
    let mut reach = vec![0u64; n * words];
    for v in 0..n {
        reach[v * words + v / 64] |= 1 << (v % 64);
    }
    let mut next = reach.clone();
    let full_tail = if n % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << (n % 64)) - 1
    };
    let is_full = |row: &[u64]| {
        row[..words - 1].iter().all(|&w| w == u64::MAX) && row[words - 1] == full_tail
    };
    let mut radius = 0;
    loop {
        if (0..n).all(|v| is_full(&reach[v * words..(v + 1) * words])) {
            return Ok(radius);
        }
        for v in 0..n {
            let row = &mut next[v * words..(v + 1) * words];
            for &w in g.neighbors(v) {
                let src = &reach[w as usize * words..(w as usize + 1) * words];
                for (a, b) in row.iter_mut().zip(src) {
                    *a |= b;
                }
            }
        }
        if reach == next {
            let stuck = (0..n)
                .find(|&v| !is_full(&reach[v * words..(v + 1) * words]))
                .unwrap_or(0);
            let reached: u32 = reach[stuck * words..(stuck + 1) * words]
                .iter()
                .map(|w| w.count_ones())
                .sum();
            return Err(Error::Disconnected {
                root: stuck,
                unreachable: n - reached as usize,
            });
        }
        reach.copy_from_slice(&next);
        radius += 1;
    }
}

#[cfg(test)]
pub(crate) fn all_pairs_diameter<T: Topology + ?Sized>(g: &T) -> Result<usize> {
    let n = g.node_count();
    let mut dist = vec![UNREACHED; n];
    let mut queue = Vec::with_capacity(n);
    let mut best = 0;
    for root in 0..n {
        dist.fill(UNREACHED);
        queue.clear();
        dist[root] = 0;
        queue.push(root as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let next = dist[u] + 1;
            for &v in g.neighbors(u) {
                if dist[v as usize] == UNREACHED {
                    dist[v as usize] = next;
                    queue.push(v);
                }
            }
        }
        if queue.len() < n {
            return Err(Error::Disconnected {
                root,
                unreachable: n - queue.len(),
            });
        }
        best = best.max(dist[*queue.last().unwrap() as usize]);
    }
    Ok(best as usize)
}
