//! Multi-COBRA: δ coalescing-branching random walks run side by side from one
//! source, each phase taking two rounds.
//!
//! In every phase a node holding tokens of walks `i₁ < i₂ < …` draws two
//! independent uniform permutations `σ₁, σ₂` of its Δ slots (self-loops
//! included) and sends walk `i`'s copies to slots `σ₁(i)` and `σ₂(i)`, one
//! permutation per round. Because a permutation is injective, no slot ever
//! carries two tokens in the same round. Copies of one walk that meet at a
//! node coalesce. A copy sent into a self-loop slot stays where it is and
//! marks no edge; a copy sent over a real edge marks that edge for its walk.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::{bitset_diameter, Csr, Graph};
use crate::rng::RngSeed;

const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CobraConfig {
    /// κ; only 2 is supported.
    pub branching_factor: usize,
    pub num_walks: usize,
    /// Explicit phase count; otherwise `⌈cover_constant · log₂ n⌉`.
    pub phases: Option<usize>,
    pub cover_constant: f64,
}

impl CobraConfig {
    pub fn new(num_walks: usize) -> CobraConfig {
        CobraConfig {
            branching_factor: 2,
            num_walks,
            phases: None,
            cover_constant: 8.0,
        }
    }

    pub fn with_phases(mut self, phases: usize) -> CobraConfig {
        self.phases = Some(phases);
        self
    }

    pub fn phases_for(&self, n: usize) -> usize {
        self.phases
            .unwrap_or_else(|| (self.cover_constant * (n as f64).log2()).ceil().max(0.0) as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.branching_factor != 2 {
            return Err(Error::invalid(format!(
                "only branching factor 2 is implemented, got {}",
                self.branching_factor
            )));
        }
        if self.num_walks == 0 {
            return Err(Error::invalid("num_walks must be positive"));
        }
        if !(self.cover_constant > 0.0) {
            return Err(Error::invalid("cover_constant must be positive"));
        }
        Ok(())
    }
}

/// Fixed-width bit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(rows: usize, width: usize) -> BitRows {
        let words = width.div_ceil(64).max(1);
        BitRows {
            words,
            bits: vec![0; rows * words],
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    /// Sets a bit and reports whether it was newly set.
    fn set(&mut self, r: usize, c: usize) -> bool {
        let w = &mut self.bits[r * self.words + c / 64];
        let mask = 1u64 << (c % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    fn clear(&mut self) {
        self.bits.fill(0);
    }

    fn ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    fn count(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Result of a multi-COBRA run.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCobraAssignment {
    node_count: usize,
    source: usize,
    num_walks: usize,
    phases_run: usize,
    /// Undirected endpoints per edge id, copied from the graph.
    edges: Vec<(u32, u32)>,
    /// Walk memberships per edge id.
    edge_walks: BitRows,
    /// `first_held[walk * n + v]`: first phase at which `v` held the walk.
    first_held: Vec<u32>,
    /// Holders per phase, node-major bitsets over walks. Empty when the
    /// assignment was loaded from a file.
    history: Vec<BitRows>,
    max_new_marks_per_phase: usize,
}

/// Edges and nodes of one walk's subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphView {
    pub walk_index: usize,
    pub nodes: Vec<usize>,
    /// Undirected edge ids.
    pub edges: Vec<usize>,
}

impl MultiCobraAssignment {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn num_walks(&self) -> usize {
        self.num_walks
    }

    pub fn phases_run(&self) -> usize {
        self.phases_run
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.edges[e];
        (u as usize, v as usize)
    }

    /// Walks whose subgraph contains edge `e`.
    pub fn edge_walks(&self, e: usize) -> Vec<usize> {
        self.edge_walks.ones(e).collect()
    }

    pub fn edge_weight(&self, e: usize) -> usize {
        self.edge_walks.count(e)
    }

    pub fn edge_has_walk(&self, e: usize, walk: usize) -> bool {
        self.edge_walks.get(e, walk)
    }

    pub fn max_edge_weight(&self) -> usize {
        (0..self.edge_count())
            .map(|e| self.edge_weight(e))
            .max()
            .unwrap_or(0)
    }

    /// Largest number of memberships any edge gained within a single phase.
    pub fn max_new_marks_per_phase(&self) -> usize {
        self.max_new_marks_per_phase
    }

    /// Nodes holding `walk` at the start of `phase` (phase 0 is the source
    /// alone). `None` when the history was not kept.
    pub fn token_holders(&self, phase: usize, walk: usize) -> Option<Vec<usize>> {
        let rows = self.history.get(phase)?;
        Some(
            (0..self.node_count)
                .filter(|&v| rows.get(v, walk))
                .collect(),
        )
    }

    pub fn has_history(&self) -> bool {
        !self.history.is_empty()
    }

    /// First phase at which `v` held `walk`.
    pub fn first_held(&self, walk: usize, v: usize) -> Option<usize> {
        let p = self.first_held[walk * self.node_count + v];
        (p != NEVER).then_some(p as usize)
    }

    pub fn subgraph(&self, walk: usize) -> SubgraphView {
        let edges: Vec<usize> = (0..self.edge_count())
            .filter(|&e| self.edge_walks.get(e, walk))
            .collect();
        let nodes = (0..self.node_count)
            .filter(|&v| self.first_held(walk, v).is_some())
            .collect();
        SubgraphView {
            walk_index: walk,
            nodes,
            edges,
        }
    }

    /// Simple adjacency of one walk's subgraph over all `n` nodes.
    pub fn subgraph_adjacency(&self, walk: usize) -> Csr {
        Csr::from_edges(
            self.node_count,
            (0..self.edge_count())
                .filter(|&e| self.edge_walks.get(e, walk))
                .map(|e| self.edge_endpoints(e)),
        )
    }

    pub fn to_file(&self) -> AssignmentFile {
        let edges = (0..self.edge_count())
            .filter(|&e| self.edge_weight(e) > 0)
            .map(|e| {
                let (u, v) = self.edge_endpoints(e);
                (u, v, self.edge_walks(e))
            })
            .collect();
        let first_held = (0..self.num_walks)
            .map(|w| {
                (0..self.node_count)
                    .map(|v| self.first_held(w, v))
                    .collect()
            })
            .collect();
        AssignmentFile {
            n: self.node_count,
            source: self.source,
            num_walks: self.num_walks,
            phases: self.phases_run,
            max_new_marks_per_phase: self.max_new_marks_per_phase,
            edges,
            first_held,
        }
    }

    /// Rebuilds an assignment over `g` from its file form. The per-phase
    /// holder history is not stored in files.
    pub fn from_file(g: &Graph, f: &AssignmentFile) -> Result<MultiCobraAssignment> {
        let n = g.node_count();
        if f.n != n {
            return Err(Error::invalid(format!(
                "assignment has {} nodes, graph has {n}",
                f.n
            )));
        }
        if f.source >= n {
            return Err(Error::NodeOutOfRange {
                node: f.source,
                node_count: n,
            });
        }
        if f.first_held.len() != f.num_walks || f.first_held.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(
                "first_held must be num_walks rows of n entries",
            ));
        }
        let mut edge_walks = BitRows::new(g.distinct_edge_count(), f.num_walks);
        for (u, v, walks) in &f.edges {
            let e = g.edge_id(*u, *v).ok_or_else(|| {
                Error::invalid(format!("assignment edge ({u}, {v}) not in graph"))
            })?;
            for &w in walks {
                if w >= f.num_walks {
                    return Err(Error::invalid(format!("walk id {w} out of range")));
                }
                edge_walks.set(e, w);
            }
        }
        let first_held = f
            .first_held
            .iter()
            .flatten()
            .map(|p| p.map_or(NEVER, |p| p as u32))
            .collect();
        Ok(MultiCobraAssignment {
            node_count: n,
            source: f.source,
            num_walks: f.num_walks,
            phases_run: f.phases,
            edges: g.edges().map(|(u, v, _)| (u as u32, v as u32)).collect(),
            edge_walks,
            first_held,
            history: Vec::new(),
            max_new_marks_per_phase: f.max_new_marks_per_phase,
        })
    }
}

/// Serialized form of an assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub n: usize,
    pub source: usize,
    pub num_walks: usize,
    pub phases: usize,
    pub max_new_marks_per_phase: usize,
    /// `[u, v, [walk ids]]` for every edge in at least one subgraph.
    pub edges: Vec<(usize, usize, Vec<usize>)>,
    /// Per walk, per node: first phase holding the walk.
    pub first_held: Vec<Vec<Option<usize>>>,
}

/// Where a node's slots lead: `(neighbor, edge id)` for real edges (one
/// entry per unit of multiplicity), then self-loops.
struct SlotTable {
    offsets: Vec<usize>,
    real: Vec<(u32, u32)>,
    slots: usize,
}

impl SlotTable {
    fn new(g: &Graph) -> SlotTable {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut real = Vec::new();
        offsets.push(0);
        for v in 0..n {
            for pos in g.directed_range(v) {
                let (_, w) = g.directed_endpoints(pos);
                let e = g.edge_of_directed(pos);
                for _ in 0..g.neighbor_multiplicities(v)[pos - g.directed_range(v).start] {
                    real.push((w as u32, e as u32));
                }
            }
            offsets.push(real.len());
        }
        SlotTable {
            offsets,
            real,
            slots: g.slot_range().1,
        }
    }

    /// Target of slot `s` at node `v`: `Some((neighbor, edge))` or `None`
    /// for a self-loop.
    fn target(&self, v: usize, s: usize) -> Option<(usize, usize)> {
        let row = &self.real[self.offsets[v]..self.offsets[v + 1]];
        row.get(s).map(|&(w, e)| (w as usize, e as usize))
    }
}

/// Draws the first `len` positions of a uniform permutation of `0..perm.len()`
/// by a partial Fisher–Yates shuffle.
fn draw_positions(rng: &mut ChaCha8Rng, perm: &mut [u32], len: usize) {
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i as u32;
    }
    let slots = perm.len();
    for i in 0..len {
        let j = rng.random_range(i..slots);
        perm.swap(i, j);
    }
}

/// Runs multi-COBRA on a regularized graph.
pub fn run_multi_cobra(
    g: &Graph,
    source: usize,
    cfg: &CobraConfig,
    seed: RngSeed,
) -> Result<MultiCobraAssignment> {
    cfg.validate()?;
    let n = g.node_count();
    if source >= n {
        return Err(Error::NodeOutOfRange {
            node: source,
            node_count: n,
        });
    }
    let (min, max) = g.slot_range();
    if min != max {
        return Err(Error::NotRegular { min, max });
    }
    if cfg.num_walks > min {
        return Err(Error::invalid(format!(
            "{} walks exceed the slot count {min}",
            cfg.num_walks
        )));
    }
    let phases = cfg.phases_for(n);
    let walks = cfg.num_walks;
    let table = SlotTable::new(g);
    let m = g.distinct_edge_count();

    let mut rng = seed.rng();
    let mut edge_walks = BitRows::new(m, walks);
    let mut first_held = vec![NEVER; walks * n];
    let mut holders = BitRows::new(n, walks);
    for w in 0..walks {
        holders.set(source, w);
        first_held[w * n + source] = 0;
    }
    let mut history = vec![holders.clone()];
    let mut next = BitRows::new(n, walks);
    let mut perm = [vec![0u32; table.slots], vec![0u32; table.slots]];
    let mut marks_stamp = vec![usize::MAX; m];
    let mut marks = vec![0usize; m];
    let mut max_new = 0usize;
    let mut slot_round = vec![usize::MAX; table.slots];

    for phase in 1..=phases {
        next.clear();
        for u in 0..n {
            let held: Vec<usize> = holders.ones(u).collect();
            let Some(&top) = held.last() else {
                continue;
            };
            for p in perm.iter_mut() {
                draw_positions(&mut rng, p, top + 1);
            }
            for (round, p) in perm.iter().enumerate() {
                let stamp = (phase * n + u) * 2 + round;
                for &w in &held {
                    let s = p[w] as usize;
                    // Permutations are injective, so one token per slot per round.
                    assert_ne!(
                        slot_round[s], stamp,
                        "slot {s} of node {u} reused in a round"
                    );
                    slot_round[s] = stamp;
                    match table.target(u, s) {
                        None => {
                            next.set(u, w);
                        }
                        Some((to, e)) => {
                            next.set(to, w);
                            if edge_walks.set(e, w) {
                                if marks_stamp[e] != phase {
                                    marks_stamp[e] = phase;
                                    marks[e] = 0;
                                }
                                marks[e] += 1;
                                max_new = max_new.max(marks[e]);
                            }
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut holders, &mut next);
        for v in 0..n {
            for w in holders.ones(v) {
                let slot = &mut first_held[w * n + v];
                if *slot == NEVER {
                    *slot = phase as u32;
                }
            }
        }
        history.push(holders.clone());
    }

    Ok(MultiCobraAssignment {
        node_count: n,
        source,
        num_walks: walks,
        phases_run: phases,
        edges: g.edges().map(|(u, v, _)| (u as u32, v as u32)).collect(),
        edge_walks,
        first_held,
        history,
        max_new_marks_per_phase: max_new,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkCoverage {
    pub walk: usize,
    pub covered: bool,
    /// First phase after which every node had held the walk.
    pub cover_phase: Option<usize>,
}

pub fn coverage_report(a: &MultiCobraAssignment) -> Vec<WalkCoverage> {
    (0..a.num_walks)
        .map(|walk| {
            let mut phase = Some(0usize);
            for v in 0..a.node_count {
                match (phase, a.first_held(walk, v)) {
                    (Some(p), Some(q)) => phase = Some(p.max(q)),
                    _ => phase = None,
                }
            }
            WalkCoverage {
                walk,
                covered: phase.is_some(),
                cover_phase: phase,
            }
        })
        .collect()
}

/// Number of edges per walk-membership count, zero included.
pub fn edge_weight_histogram(a: &MultiCobraAssignment) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for e in 0..a.edge_count() {
        *h.entry(a.edge_weight(e)).or_insert(0) += 1;
    }
    h
}

/// Exact diameter of one walk's subgraph. Errors if the walk did not reach
/// every node.
pub fn subgraph_diameter(a: &MultiCobraAssignment, walk: usize) -> Result<usize> {
    if walk >= a.num_walks {
        return Err(Error::invalid(format!("walk {walk} out of range")));
    }
    let adjacency = a.subgraph_adjacency(walk);
    let reached = (0..a.node_count)
        .filter(|&v| a.first_held(walk, v).is_some())
        .count();
    if reached < a.node_count {
        return Err(Error::WalkNotCovering {
            walk,
            reached,
            node_count: a.node_count,
        });
    }
    bitset_diameter(&adjacency)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkUniformity {
    pub walk: usize,
    /// How often each slot was chosen by the first permutation.
    pub slot_counts: Vec<u64>,
    pub chi_square: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityStats {
    pub trials: u64,
    pub slots: usize,
    pub walks: Vec<WalkUniformity>,
    /// 0.999 quantile of χ² with `slots - 1` degrees of freedom.
    pub critical_value: f64,
    /// Trials in which two held walks drew the same slot in one permutation.
    pub collisions: u64,
}

impl UniformityStats {
    pub fn passes(&self) -> bool {
        self.walks
            .iter()
            .all(|w| w.chi_square < self.critical_value)
    }
}

/// Repeats the per-node dispatch of `held` walks at `holder` and tallies the
/// slot each walk lands on.
pub fn marginal_uniformity_test(
    g: &Graph,
    holder: usize,
    held: &[usize],
    trials: u64,
    seed: RngSeed,
) -> Result<UniformityStats> {
    let (min, max) = g.slot_range();
    if min != max {
        return Err(Error::NotRegular { min, max });
    }
    if holder >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            node: holder,
            node_count: g.node_count(),
        });
    }
    let Some(&top) = held.iter().max() else {
        return Err(Error::invalid("at least one held walk is required"));
    };
    if top >= max {
        return Err(Error::invalid(format!(
            "walk {top} exceeds slot count {max}"
        )));
    }
    if max < 2 {
        return Err(Error::invalid("uniformity needs at least two slots"));
    }
    let mut rng = seed.rng();
    let mut perm = vec![0u32; max];
    let mut counts = vec![vec![0u64; max]; held.len()];
    let mut collisions = 0;
    let mut seen = vec![u64::MAX; max];
    for trial in 0..trials {
        draw_positions(&mut rng, &mut perm, top + 1);
        let mut collided = false;
        for (k, &w) in held.iter().enumerate() {
            let s = perm[w] as usize;
            counts[k][s] += 1;
            collided |= seen[s] == trial;
            seen[s] = trial;
        }
        collisions += collided as u64;
    }
    let expected = trials as f64 / max as f64;
    let walks = held
        .iter()
        .zip(counts)
        .map(|(&walk, slot_counts)| {
            let chi_square = slot_counts
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum();
            WalkUniformity {
                walk,
                slot_counts,
                chi_square,
            }
        })
        .collect();
    let critical_value = ChiSquared::new((max - 1) as f64)
        .map_err(|e| Error::invalid(e.to_string()))?
        .inverse_cdf(0.999);
    Ok(UniformityStats {
        trials,
        slots: max,
        walks,
        critical_value,
        collisions,
    })
}
