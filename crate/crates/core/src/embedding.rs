//! A virtual random graph embedded in an arbitrary host.
//!
//! Every directed host edge is a sub-node, simulated by its tail. Each host
//! node packs its sub-nodes, in slot order, into groups of exactly δ(H); the
//! groups are the virtual nodes and leftover sub-nodes are inactive. Every
//! active sub-node launches a lazy random walk of `tau` steps over sub-nodes
//! (stay with probability 1/2, else move to a uniform out-edge of the head).
//! A walk ending on an active sub-node `b` establishes the virtual edge
//! `group(a) - group(b)`; one ending on an inactive sub-node is retried. The
//! outcome travels back to the start along the reversed walk.
//!
//! A token in state `x -> y` sits at host `x`; moving on crosses host edge
//! `x -> y`. All walks of one attempt round advance in lockstep, and a step
//! costs as many host rounds as the busiest directed host edge needs, at
//! least one.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::broadcast::{broadcast_over_packing, BroadcastTrace, MessageSet};
use crate::cobra::{coverage_report, run_multi_cobra, CobraConfig};
use crate::error::{Error, Result};
use crate::graph::{bitset_diameter, Graph};
use crate::packing::build_tree_packing;
use crate::rng::RngSeed;
use crate::spectral::{
    lazy_lambda, mixing_bounds_from_gap, mixing_time_empirical, normalized_adjacency, MixingOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubNodeSpace {
    /// δ(H), the group size.
    pub group_size: usize,
    /// Group of each sub-node (directed host edge position), if active.
    pub group_of: Vec<Option<u32>>,
    /// Host node simulating each group.
    pub host_of: Vec<u32>,
}

impl SubNodeSpace {
    pub fn subnode_count(&self) -> usize {
        self.group_of.len()
    }

    pub fn group_count(&self) -> usize {
        self.host_of.len()
    }

    pub fn is_active(&self, subnode: usize) -> bool {
        self.group_of[subnode].is_some()
    }

    pub fn inactive_count(&self) -> usize {
        self.group_of.iter().filter(|g| g.is_none()).count()
    }
}

/// Groups every host node's out-edges into ⌊deg/δ⌋ groups of δ.
pub fn build_subnode_space(h: &Graph) -> Result<SubNodeSpace> {
    if !h.is_simple() {
        return Err(Error::invalid("embedding hosts must be simple graphs"));
    }
    let delta = h.degree_stats().min;
    if delta == 0 {
        let v = (0..h.node_count()).find(|&v| h.degree(v) == 0).unwrap_or(0);
        return Err(Error::IsolatedNode(v));
    }
    let mut group_of = vec![None; h.directed_edge_count()];
    let mut host_of = Vec::new();
    for v in 0..h.node_count() {
        let range = h.directed_range(v);
        let full = range.len() / delta;
        for (i, pos) in range.enumerate().take(full * delta) {
            if i % delta == 0 {
                host_of.push(v as u32);
            }
            group_of[pos] = Some((host_of.len() - 1) as u32);
        }
    }
    Ok(SubNodeSpace {
        group_size: delta,
        group_of,
        host_of,
    })
}

/// One lazy walk over sub-nodes: `states[0]` is the start, `states[tau]`
/// the end.
pub fn sample_lazy_walk(h: &Graph, start: usize, tau: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut states = Vec::with_capacity(tau + 1);
    let mut s = start;
    states.push(s as u32);
    for _ in 0..tau {
        if rng.random_bool(0.5) {
            let (_, head) = h.directed_endpoints(s);
            let range = h.directed_range(head);
            s = range.start + rng.random_range(0..range.len());
        }
        states.push(s as u32);
    }
    states
}

/// Host hops of a walk: step `i` (1-based) crosses the state edge at `i - 1`
/// when the state changes.
fn hops(h: &Graph, states: &[u32]) -> Vec<Option<(u32, u32)>> {
    states
        .windows(2)
        .map(|w| {
            (w[0] != w[1]).then(|| {
                let (x, y) = h.directed_endpoints(w[0] as usize);
                (x as u32, y as u32)
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstablishedWalk {
    pub subnode: u32,
    pub target: u32,
    /// Sub-node states, `tau + 1` entries.
    pub states: Vec<u32>,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub space: SubNodeSpace,
    /// One node per group. Walks that return to their own group add no edge.
    #[serde(skip)]
    pub virtual_graph: Graph,
    pub tau_used: usize,
    pub retry_cap: usize,
    /// Successful walk of every active sub-node, in sub-node order.
    pub walks: Vec<EstablishedWalk>,
    /// Retries per sub-node (0 for inactive ones).
    pub retries_used: Vec<u32>,
    pub attempt_rounds: usize,
    pub self_walks: usize,
    /// Notifications checked against the reversed walk, and mismatches.
    pub notifications_checked: u64,
    pub notification_mismatches: u64,
}

impl Embedding {
    pub fn host_of(&self, group: usize) -> usize {
        self.space.host_of[group] as usize
    }

    /// Established walks started by each group.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.space.group_count()];
        for w in &self.walks {
            let g =
                self.space.group_of[w.subnode as usize].expect("walks start at active sub-nodes");
            out[g as usize] += 1;
        }
        out
    }

    pub fn max_retries(&self) -> u32 {
        self.retries_used.iter().copied().max().unwrap_or(0)
    }
}

/// Round counters for the host-side simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoundLedger {
    pub estimate_rounds: usize,
    pub bfs_rounds: usize,
    pub embed_rounds: usize,
    pub virtual_rounds: usize,
    pub simulate_rounds_per_virtual_round: usize,
    pub flood_rounds: usize,
    pub total: usize,
}

impl RoundLedger {
    pub fn simulate_rounds(&self) -> usize {
        self.virtual_rounds * self.simulate_rounds_per_virtual_round
    }

    fn close(mut self) -> RoundLedger {
        self.total = self.estimate_rounds
            + self.bfs_rounds
            + self.embed_rounds
            + self.simulate_rounds()
            + self.flood_rounds;
        self
    }

    pub fn is_consistent(&self) -> bool {
        self.total
            == self.estimate_rounds
                + self.bfs_rounds
                + self.embed_rounds
                + self.simulate_rounds()
                + self.flood_rounds
    }
}

/// Per-step load counter over directed host edges.
struct StepLoad {
    load: Vec<u32>,
    stamp: Vec<u32>,
}

impl StepLoad {
    fn new(h: &Graph) -> StepLoad {
        StepLoad {
            load: vec![0; h.directed_edge_count()],
            stamp: vec![u32::MAX; h.directed_edge_count()],
        }
    }

    /// Host rounds for one synchronous step carrying `hops`.
    fn step_rounds(
        &mut self,
        h: &Graph,
        step_id: u32,
        hops: impl Iterator<Item = (u32, u32)>,
    ) -> usize {
        let mut max = 0;
        for (x, y) in hops {
            let pos = h
                .directed_index(x as usize, y as usize)
                .expect("hop over host edge");
            if self.stamp[pos] != step_id {
                self.stamp[pos] = step_id;
                self.load[pos] = 0;
            }
            self.load[pos] += 1;
            max = max.max(self.load[pos]);
        }
        max.max(1) as usize
    }
}

/// Walks one attempt back along its per-host breadcrumbs and returns the
/// host hops taken, in notification order.
fn notify(crumbs: &[Option<u32>], end_host: u32) -> Vec<(u32, u32)> {
    let mut path = Vec::new();
    let mut at = end_host;
    for crumb in crumbs.iter().rev() {
        if let Some(from) = crumb {
            path.push((at, *from));
            at = *from;
        }
    }
    path
}

pub fn retry_cap(n: usize) -> usize {
    (10.0 * (n as f64).log2()).ceil().max(1.0) as usize
}

/// Embeds the virtual graph with walks of length `tau`.
pub fn embed_er_graph(h: &Graph, tau: usize, seed: RngSeed) -> Result<(Embedding, RoundLedger)> {
    if tau == 0 {
        return Err(Error::invalid("tau must be at least 1"));
    }
    let space = build_subnode_space(h)?;
    let cap = retry_cap(h.node_count());
    let subnodes = space.subnode_count();
    let mut rng = seed.rng();
    let mut pending: Vec<usize> = (0..subnodes).filter(|&s| space.is_active(s)).collect();
    let mut retries = vec![0u32; subnodes];
    let mut done: Vec<Option<EstablishedWalk>> = vec![None; subnodes];
    let mut meter = StepLoad::new(h);
    let mut step_id = 0u32;
    let mut embed_rounds = 0;
    let mut attempt_rounds = 0;
    let (mut checked, mut mismatches) = (0u64, 0u64);

    while !pending.is_empty() {
        if attempt_rounds > cap {
            let s = pending[0];
            return Err(Error::EmbeddingFailed { subnode: s, cap });
        }
        attempt_rounds += 1;
        let traces: Vec<Vec<u32>> = pending
            .iter()
            .map(|&s| sample_lazy_walk(h, s, tau, &mut rng))
            .collect();
        let forward: Vec<Vec<Option<(u32, u32)>>> = traces.iter().map(|t| hops(h, t)).collect();
        for i in 0..tau {
            step_id += 1;
            embed_rounds += meter.step_rounds(h, step_id, forward.iter().filter_map(|f| f[i]));
        }
        // Each host that received a token remembers the sender; the outcome
        // retraces those breadcrumbs.
        let notifications: Vec<Vec<(u32, u32)>> = forward
            .iter()
            .zip(&traces)
            .map(|(f, t)| {
                let crumbs: Vec<Option<u32>> = f.iter().map(|hop| hop.map(|(x, _)| x)).collect();
                let (end_host, _) = h.directed_endpoints(*t.last().unwrap() as usize);
                notify(&crumbs, end_host as u32)
            })
            .collect();
        for (f, back) in forward.iter().zip(&notifications) {
            let mut reversed: Vec<(u32, u32)> = f.iter().flatten().map(|&(x, y)| (y, x)).collect();
            reversed.reverse();
            checked += 1;
            if &reversed != back {
                mismatches += 1;
            }
        }
        // Notifications move in lockstep too, mirroring the forward steps.
        let mut cursor: Vec<usize> = vec![0; notifications.len()];
        for i in (0..tau).rev() {
            step_id += 1;
            let mut moving = Vec::new();
            for (j, f) in forward.iter().enumerate() {
                if f[i].is_some() {
                    moving.push(notifications[j][cursor[j]]);
                    cursor[j] += 1;
                }
            }
            embed_rounds += meter.step_rounds(h, step_id, moving.into_iter());
        }

        let mut still = Vec::new();
        for (&s, states) in pending.iter().zip(traces) {
            let end = *states.last().unwrap() as usize;
            if space.is_active(end) {
                done[s] = Some(EstablishedWalk {
                    subnode: s as u32,
                    target: end as u32,
                    states,
                    attempts: retries[s] + 1,
                });
            } else {
                retries[s] += 1;
                if retries[s] as usize > cap {
                    return Err(Error::EmbeddingFailed { subnode: s, cap });
                }
                still.push(s);
            }
        }
        pending = still;
    }

    let walks: Vec<EstablishedWalk> = done.into_iter().flatten().collect();
    let mut virtual_edges = Vec::with_capacity(walks.len());
    let mut self_walks = 0;
    for w in &walks {
        let a = space.group_of[w.subnode as usize].unwrap() as usize;
        let b = space.group_of[w.target as usize].unwrap() as usize;
        if a == b {
            self_walks += 1;
        } else {
            virtual_edges.push((a, b));
        }
    }
    let virtual_graph = Graph::from_edges(space.group_count(), virtual_edges)?;
    let embedding = Embedding {
        space,
        virtual_graph,
        tau_used: tau,
        retry_cap: cap,
        walks,
        retries_used: retries,
        attempt_rounds,
        self_walks,
        notifications_checked: checked,
        notification_mismatches: mismatches,
    };
    let ledger = RoundLedger {
        embed_rounds,
        ..RoundLedger::default()
    }
    .close();
    Ok((embedding, ledger))
}

/// Host rounds for one virtual round: every virtual edge sends one message
/// each way along its walk, all in lockstep.
pub fn virtual_round_cost(h: &Graph, e: &Embedding) -> usize {
    let mut meter = StepLoad::new(h);
    let forward: Vec<Vec<Option<(u32, u32)>>> = e
        .walks
        .iter()
        .filter(|w| e.space.group_of[w.subnode as usize] != e.space.group_of[w.target as usize])
        .map(|w| hops(h, &w.states))
        .collect();
    let tau = e.tau_used;
    let mut total = 0;
    for i in 0..tau {
        let back = tau - 1 - i;
        let moving = forward.iter().flat_map(|f| {
            let out = f[i];
            let ret = f[back].map(|(x, y)| (y, x));
            out.into_iter().chain(ret)
        });
        total += meter.step_rounds(h, i as u32, moving);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndToEndOptions {
    /// Walk length; `None` uses the empirical mixing time of the host.
    pub tau: Option<usize>,
    pub mixing_tolerance: Option<f64>,
    /// Constant in the charged estimator cost `c_est · τ_upper · log₂² n`.
    pub c_est: f64,
    pub cover_constant: f64,
    pub phases: Option<usize>,
    /// Extra COBRA attempts (seed + 1, ...) when a walk fails to cover.
    pub max_retries: usize,
    /// Run the final neighbor flood for hosts without a group.
    pub flood_fallback: bool,
}

impl Default for EndToEndOptions {
    fn default() -> Self {
        EndToEndOptions {
            tau: None,
            mixing_tolerance: None,
            c_est: 1.0,
            cover_constant: 8.0,
            phases: None,
            max_retries: 3,
            flood_fallback: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndToEndReport {
    pub ledger: RoundLedger,
    pub tau: usize,
    pub virtual_nodes: usize,
    pub virtual_source: usize,
    pub virtual_walks: usize,
    pub cobra_attempts: usize,
    pub packing_size: usize,
    pub packing_diameter: usize,
    pub packing_weight: usize,
    pub virtual_broadcast_rounds: usize,
    pub max_retries: u32,
    pub hosts_saturated: bool,
}

/// The full pipeline on host `h` from host node `source`.
pub fn end_to_end_expander_broadcast(
    h: &Graph,
    source: usize,
    k: usize,
    opts: &EndToEndOptions,
    seed: RngSeed,
) -> Result<(BroadcastTrace, EndToEndReport)> {
    let n = h.node_count();
    if source >= n {
        return Err(Error::NodeOutOfRange {
            node: source,
            node_count: n,
        });
    }
    let msgs = MessageSet::new(k)?;
    let log2n = (n as f64).log2().max(1.0);

    // Estimation, charged rather than simulated.
    let eigenvalues = normalized_adjacency(h)?.eigenvalues()?;
    let lazy = lazy_lambda(&eigenvalues).clamp(0.0, 1.0 - f64::EPSILON);
    let (_, upper) = mixing_bounds_from_gap(lazy, n)?;
    let estimate_rounds = (opts.c_est * upper * log2n * log2n).ceil() as usize;
    let bfs_rounds = bitset_diameter(h)?;

    let tau = match opts.tau {
        Some(t) => t,
        None => mixing_time_empirical(
            h,
            &MixingOptions {
                tolerance: opts.mixing_tolerance,
                t_max: None,
            },
        )?
        .t
        .max(1),
    };
    let (embedding, embed_ledger) = embed_er_graph(h, tau, seed)?;
    let per_round = virtual_round_cost(h, &embedding);

    let vg = &embedding.virtual_graph;
    let virtual_source = (0..embedding.space.group_count())
        .find(|&g| embedding.host_of(g) == source)
        .ok_or_else(|| Error::invalid(format!("source {source} simulates no group")))?;
    let regular = vg.regularize()?;
    let walks = embedding.space.group_size.min(vg.degree_stats().min);
    if walks == 0 {
        return Err(Error::invalid("virtual graph has an isolated group"));
    }
    let mut cfg = CobraConfig::new(walks);
    cfg.cover_constant = opts.cover_constant;
    cfg.phases = opts.phases;

    let mut attempt = 0;
    let assignment = loop {
        let a = run_multi_cobra(
            &regular,
            virtual_source,
            &cfg,
            seed.offset(attempt as u64 + 1),
        )?;
        if coverage_report(&a).iter().all(|c| c.covered) {
            break a;
        }
        if attempt == opts.max_retries {
            return Err(Error::WalkNotCovering {
                walk: coverage_report(&a)
                    .iter()
                    .position(|c| !c.covered)
                    .unwrap_or(0),
                reached: 0,
                node_count: vg.node_count(),
            });
        }
        log::warn!(
            "virtual COBRA attempt {attempt} left a walk uncovered; retrying with the next seed"
        );
        attempt += 1;
    };
    let packing = build_tree_packing(&regular, &assignment, virtual_source)?;
    let virtual_trace = broadcast_over_packing(vg, &packing, msgs, false)?;
    let before_broadcast = 2 * assignment.phases_run() + packing.build_rounds;
    let virtual_rounds = before_broadcast + virtual_trace.total_rounds;

    // Every host simulates at least one group since deg(v) >= δ(H).
    let mut first_group = vec![None; n];
    for g in 0..embedding.space.group_count() {
        let host = embedding.host_of(g);
        first_group[host].get_or_insert(g);
    }
    let orphans: Vec<usize> = (0..n).filter(|&v| first_group[v].is_none()).collect();
    assert!(
        opts.flood_fallback || orphans.is_empty(),
        "host {:?} simulates no group",
        orphans.first()
    );
    let flood_rounds = usize::from(!orphans.is_empty());

    let ledger = RoundLedger {
        estimate_rounds,
        bfs_rounds,
        embed_rounds: embed_ledger.embed_rounds,
        virtual_rounds,
        simulate_rounds_per_virtual_round: per_round,
        flood_rounds,
        total: 0,
    }
    .close();
    let offset = estimate_rounds + bfs_rounds + embed_ledger.embed_rounds;
    let host_round = |virtual_round: usize| {
        if virtual_round == 0 {
            0
        } else {
            offset + (before_broadcast + virtual_round) * per_round
        }
    };
    let mut receipt = vec![None; n * k];
    for v in 0..n {
        for m in 0..k {
            let r = embedding
                .space
                .host_of
                .iter()
                .enumerate()
                .filter(|(_, &host)| host as usize == v)
                .filter_map(|(g, _)| virtual_trace.receipt_round(g, m))
                .min();
            receipt[v * k + m] = r.map(host_round);
        }
    }
    if flood_rounds > 0 {
        for &v in &orphans {
            let via = h
                .neighbors(v)
                .iter()
                .find(|&&w| first_group[w as usize].is_some())
                .copied();
            if let Some(w) = via {
                for m in 0..k {
                    receipt[v * k + m] = receipt[w as usize * k + m].map(|_| ledger.total);
                }
            }
        }
    }
    let hosts_saturated = receipt.iter().all(Option::is_some);
    let trace = BroadcastTrace::from_receipts(
        n,
        k,
        source,
        receipt,
        ledger.total,
        virtual_trace.send_count,
    )?;
    let report = EndToEndReport {
        ledger,
        tau,
        virtual_nodes: vg.node_count(),
        virtual_source,
        virtual_walks: walks,
        cobra_attempts: attempt + 1,
        packing_size: packing.size,
        packing_diameter: packing.diameter,
        packing_weight: packing.weight,
        virtual_broadcast_rounds: virtual_trace.total_rounds,
        max_retries: embedding.max_retries(),
        hosts_saturated,
    };
    Ok((trace, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, erdos_renyi, star};

    #[test]
    fn k2_space() {
        let s = build_subnode_space(&complete(2).unwrap()).unwrap();
        assert_eq!(
            (s.subnode_count(), s.group_count(), s.inactive_count()),
            (2, 2, 0)
        );
    }

    #[test]
    fn star_space() {
        let s = build_subnode_space(&star(3).unwrap()).unwrap();
        assert_eq!(s.group_size, 1);
        assert_eq!(s.group_count(), 6);
        assert_eq!(s.host_of.iter().filter(|&&h| h == 0).count(), 3);
    }

    #[test]
    fn inactive_count_closed_form() {
        for seed in 0..5 {
            let h = erdos_renyi(300, 0.1, RngSeed(seed)).unwrap();
            let s = build_subnode_space(&h).unwrap();
            let d = s.group_size;
            let expect: usize = (0..300).map(|v| h.degree(v) % d).sum();
            assert_eq!(s.inactive_count(), expect);
            assert!(2 * s.inactive_count() <= s.subnode_count());
        }
    }

    #[test]
    fn k2_embedding_needs_no_retries() {
        let h = complete(2).unwrap();
        let (e, ledger) = embed_er_graph(&h, 5, RngSeed(1)).unwrap();
        assert_eq!(e.max_retries(), 0);
        assert_eq!(e.walks.len(), 2);
        assert!(ledger.is_consistent());
        assert_eq!(e.out_degrees(), vec![1, 1]);
        assert_eq!(e.notification_mismatches, 0);
    }

    #[test]
    fn walk_traces_are_lazy_walks() {
        let h = erdos_renyi(60, 0.2, RngSeed(2)).unwrap();
        let (e, _) = embed_er_graph(&h, 7, RngSeed(2)).unwrap();
        for w in &e.walks {
            assert_eq!(w.states.len(), 8);
            assert_eq!(w.states[0], w.subnode);
            for pair in w.states.windows(2) {
                if pair[0] != pair[1] {
                    let (_, head) = h.directed_endpoints(pair[0] as usize);
                    assert_eq!(h.directed_endpoints(pair[1] as usize).0, head);
                }
            }
        }
        assert!(e.out_degrees().iter().all(|&d| d == e.space.group_size));
        assert_eq!(e.notification_mismatches, 0);
        assert_eq!(
            e.notifications_checked as usize,
            e.walks.len() + e.retries_used.iter().sum::<u32>() as usize
        );
    }

    fn hand_embedding(h: &Graph, traces: Vec<Vec<u32>>) -> Embedding {
        let space = build_subnode_space(h).unwrap();
        let tau = traces[0].len() - 1;
        let walks = traces
            .into_iter()
            .map(|states| EstablishedWalk {
                subnode: states[0],
                target: *states.last().unwrap(),
                states,
                attempts: 1,
            })
            .collect();
        Embedding {
            virtual_graph: Graph::empty(space.group_count()).unwrap(),
            space,
            tau_used: tau,
            retry_cap: 1,
            walks,
            retries_used: vec![0; 2],
            attempt_rounds: 1,
            self_walks: 0,
            notifications_checked: 0,
            notification_mismatches: 0,
        }
    }

    #[test]
    fn virtual_round_cost_examples() {
        let h = complete(2).unwrap();
        // Sub-node 0 is 0->1 and 1 is 1->0; a walk that moves every step.
        let e = hand_embedding(&h, vec![vec![0, 1, 0, 1, 0, 1]]);
        assert_eq!(virtual_round_cost(&h, &e), 5);
        // Two walks with identical moving traces serialize on every edge.
        let p = crate::graph::path(3).unwrap();
        let line = |start: u32| {
            let mut s = vec![start];
            for _ in 0..4 {
                let cur = *s.last().unwrap() as usize;
                let (_, head) = p.directed_endpoints(cur);
                let next = p
                    .directed_range(head)
                    .find(|&q| p.directed_endpoints(q).1 != p.directed_endpoints(cur).0)
                    .unwrap_or(p.directed_range(head).start);
                s.push(next as u32);
            }
            s
        };
        let trace = line(0);
        let mut e = hand_embedding(&p, vec![trace.clone(), trace.clone()]);
        e.walks[1].subnode = 3;
        assert_eq!(virtual_round_cost(&p, &e), 2 * 4);
    }

    #[test]
    fn end_to_end_on_complete_host() {
        let h = complete(12).unwrap();
        let delta = 11;
        let (trace, report) =
            end_to_end_expander_broadcast(&h, 0, delta, &EndToEndOptions::default(), RngSeed(3))
                .unwrap();
        assert!(report.ledger.is_consistent());
        assert!(report.hosts_saturated && trace.is_saturated());
        assert_eq!(trace.total_rounds, report.ledger.total);
    }
}
