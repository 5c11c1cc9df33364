//! Multi-message broadcast over a tree packing.
//!
//! Message `m` travels in tree `m mod S`. Each tree pipelines its messages
//! downward: in every step a node forwards to each child the next message
//! that child lacks, provided the node held it before the step. Trees share
//! edges, so a step lasts `W` rounds and a tree sends over edge `{u, v}` in
//! the round given by its rank among the trees using that edge. Every send
//! passes through a meter that rejects two messages on one directed edge in
//! the same round.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bfs, BfsTree, Graph};
use crate::packing::{verify_packing, TreePacking};

const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MessageSet {
    pub k: usize,
}

impl MessageSet {
    pub fn new(k: usize) -> Result<MessageSet> {
        if k == 0 {
            return Err(Error::invalid("need at least one message"));
        }
        Ok(MessageSet { k })
    }
}

/// One message crossing one directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Send {
    pub round: u32,
    pub edge_u: u32,
    pub edge_v: u32,
    pub tree_id: u32,
    pub message_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastTrace {
    pub n: usize,
    pub k: usize,
    pub source: usize,
    pub total_rounds: usize,
    /// `receipt[v * k + m]`: round `v` first held `m`; `u32::MAX` if never.
    receipt: Vec<u32>,
    /// Most messages seen on one directed edge in one round.
    pub max_edge_load: usize,
    pub send_count: u64,
    /// Every send in round order, when recording was requested.
    pub sends: Option<Vec<Send>>,
}

impl BroadcastTrace {
    /// Trace assembled from externally computed receipt rounds.
    pub fn from_receipts(
        n: usize,
        k: usize,
        source: usize,
        receipt: Vec<Option<usize>>,
        total_rounds: usize,
        send_count: u64,
    ) -> Result<BroadcastTrace> {
        if receipt.len() != n * k {
            return Err(Error::invalid("receipt table must have n * k entries"));
        }
        Ok(BroadcastTrace {
            n,
            k,
            source,
            total_rounds,
            receipt: receipt
                .into_iter()
                .map(|r| r.map_or(NEVER, |r| r as u32))
                .collect(),
            max_edge_load: 1,
            send_count,
            sends: None,
        })
    }

    pub fn receipt_round(&self, v: usize, m: usize) -> Option<usize> {
        let r = self.receipt[v * self.k + m];
        (r != NEVER).then_some(r as usize)
    }

    /// First `(node, message)` never delivered.
    pub fn first_missing(&self) -> Option<(usize, usize)> {
        self.receipt
            .iter()
            .position(|&r| r == NEVER)
            .map(|i| (i / self.k, i % self.k))
    }

    pub fn is_saturated(&self) -> bool {
        self.first_missing().is_none()
    }

    /// Writes the recorded sends as CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let sends = self
            .sends
            .as_ref()
            .ok_or_else(|| Error::invalid("trace was run without send recording"))?;
        let mut w = csv::Writer::from_writer(out);
        for s in sends {
            w.serialize(s)?;
        }
        if sends.is_empty() {
            w.write_record(["round", "edge_u", "edge_v", "tree_id", "message_id"])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per-directed-edge congestion check. Sends must arrive in nondecreasing
/// round order, so remembering the last round per edge is enough.
struct LoadMeter<'g> {
    graph: &'g Graph,
    last_round: Vec<u32>,
    latest: u32,
}

impl<'g> LoadMeter<'g> {
    fn new(graph: &'g Graph) -> LoadMeter<'g> {
        LoadMeter {
            graph,
            last_round: vec![0; graph.directed_edge_count()],
            latest: 0,
        }
    }

    fn record(&mut self, round: u32, u: usize, v: usize) -> Result<()> {
        assert!(round >= self.latest, "sends must be metered in round order");
        self.latest = round;
        let pos = self
            .graph
            .directed_index(u, v)
            .ok_or_else(|| Error::invalid(format!("send over missing edge ({u}, {v})")))?;
        if self.last_round[pos] == round {
            return Err(Error::Oversubscribed {
                u,
                v,
                phase: round as usize,
                load: 2,
                capacity: 1,
            });
        }
        self.last_round[pos] = round;
        Ok(())
    }
}

/// Collects receipts and sends for one broadcast.
struct Recorder<'g> {
    n: usize,
    k: usize,
    receipt: Vec<u32>,
    meter: Option<LoadMeter<'g>>,
    sends: Option<Vec<Send>>,
    send_count: u64,
    total_rounds: u32,
    pending: Vec<Send>,
}

impl<'g> Recorder<'g> {
    fn new(n: usize, k: usize, graph: Option<&'g Graph>, record: bool) -> Recorder<'g> {
        Recorder {
            n,
            k,
            receipt: vec![NEVER; n * k],
            meter: graph.map(LoadMeter::new),
            sends: record.then(Vec::new),
            send_count: 0,
            total_rounds: 0,
            pending: Vec::new(),
        }
    }

    fn hold(&mut self, v: usize, m: usize, round: u32) {
        let r = &mut self.receipt[v * self.k + m];
        *r = (*r).min(round);
    }

    fn queue(&mut self, s: Send) {
        self.pending.push(s);
    }

    /// Meters and applies the sends of one step.
    fn flush(&mut self) -> Result<()> {
        let mut pending = std::mem::take(&mut self.pending);
        pending.sort_by_key(|s| (s.round, s.edge_u, s.edge_v));
        for s in &pending {
            if let Some(meter) = self.meter.as_mut() {
                meter.record(s.round, s.edge_u as usize, s.edge_v as usize)?;
            }
            self.hold(s.edge_v as usize, s.message_id as usize, s.round);
            self.total_rounds = self.total_rounds.max(s.round);
            self.send_count += 1;
        }
        if let Some(all) = self.sends.as_mut() {
            all.extend_from_slice(&pending);
        }
        pending.clear();
        self.pending = pending;
        Ok(())
    }

    fn finish(self, source: usize) -> BroadcastTrace {
        BroadcastTrace {
            n: self.n,
            k: self.k,
            source,
            total_rounds: self.total_rounds as usize,
            receipt: self.receipt,
            max_edge_load: if self.send_count > 0 { 1 } else { 0 },
            send_count: self.send_count,
            sends: self.sends,
        }
    }
}

/// One tree's share of the schedule.
struct TreeLane<'t> {
    tree: &'t BfsTree,
    id: usize,
    /// Nodes ordered by decreasing depth, root last.
    bottom_up: Vec<usize>,
    /// Round offset of the edge from each node to its parent.
    offset: Vec<u32>,
}

impl<'t> TreeLane<'t> {
    fn new(tree: &'t BfsTree, id: usize, offset: Vec<u32>) -> TreeLane<'t> {
        let mut bottom_up: Vec<usize> = (0..tree.node_count())
            .filter(|&v| tree.depth[v].is_some())
            .collect();
        bottom_up.sort_by_key(|&v| std::cmp::Reverse(tree.depth[v]));
        TreeLane {
            tree,
            id,
            bottom_up,
            offset,
        }
    }
}

fn round_of(step: usize, phase_len: usize, offset: u32) -> u32 {
    ((step - 1) * phase_len) as u32 + offset + 1
}

/// Pipelined downcast of `messages[i]` down `lanes[i]`, starting after
/// `first_step - 1` steps. Returns the number of steps used.
fn run_downcast(
    lanes: &[TreeLane],
    messages: &[Vec<usize>],
    phase_len: usize,
    first_step: usize,
    rec: &mut Recorder,
) -> Result<usize> {
    // have[i][v]: how many of lane i's messages v holds; they arrive in order.
    let mut have: Vec<Vec<usize>> = lanes
        .iter()
        .zip(messages)
        .map(|(lane, msgs)| {
            let mut h = vec![0; lane.tree.node_count()];
            h[lane.tree.root] = msgs.len();
            h
        })
        .collect();
    let mut step = first_step;
    let mut used = 0;
    loop {
        let mut moved = false;
        for (i, lane) in lanes.iter().enumerate() {
            let msgs = &messages[i];
            if msgs.is_empty() {
                continue;
            }
            // Children first, so a message moves at most one hop per step.
            for &c in &lane.bottom_up {
                let Some(p) = lane.tree.parent[c] else {
                    continue;
                };
                if have[i][p] > have[i][c] {
                    let m = msgs[have[i][c]];
                    have[i][c] += 1;
                    rec.queue(Send {
                        round: round_of(step, phase_len, lane.offset[c]),
                        edge_u: p as u32,
                        edge_v: c as u32,
                        tree_id: lane.id as u32,
                        message_id: m as u32,
                    });
                    moved = true;
                }
            }
        }
        if !moved {
            return Ok(used);
        }
        rec.flush()?;
        used += 1;
        step += 1;
    }
}

/// Rounds for pipelining `k_prime` messages down one tree: `maxdepth + k' - 1`
/// when simulated, and 0 for a single-node tree.
pub fn downcast_single_tree(tree: &BfsTree, k_prime: usize) -> Result<usize> {
    if !tree.is_spanning() {
        return Err(Error::invalid("downcast needs a spanning tree"));
    }
    if k_prime == 0 {
        return Ok(0);
    }
    let lanes = [TreeLane::new(tree, 0, vec![0; tree.node_count()])];
    let msgs = [(0..k_prime).collect::<Vec<_>>()];
    let mut rec = Recorder::new(tree.node_count(), k_prime, None, false);
    run_downcast(&lanes, &msgs, 1, 1, &mut rec)
}

/// Round offsets: tree `i` uses edge `{u, v}` in slot `rank of i among the
/// trees using {u, v}`.
fn lane_offsets(tp: &TreePacking) -> Vec<Vec<u32>> {
    let on = tp.trees_on_edge();
    tp.trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut off = vec![0u32; t.node_count()];
            for (p, c) in t.edges() {
                let users = &on[&(p.min(c), p.max(c))];
                off[c] = users.binary_search(&i).expect("tree on its own edge") as u32;
            }
            off
        })
        .collect()
}

fn checked_packing(g: &Graph, tp: &TreePacking) -> Result<()> {
    let report = verify_packing(tp, g);
    if let Some(f) = report.failures().next() {
        return Err(Error::InvalidPacking(format!(
            "{}: {}",
            f.name,
            f.detail.clone().unwrap_or_default()
        )));
    }
    if tp.size == 0 {
        return Err(Error::InvalidPacking("packing has no trees".into()));
    }
    Ok(())
}

/// Round-robin split of message ids over `s` trees.
fn partition(k: usize, s: usize) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); s];
    for m in 0..k {
        parts[m % s].push(m);
    }
    parts
}

/// Broadcasts `msgs` from the packing's source over all trees in parallel.
pub fn broadcast_over_packing(
    g: &Graph,
    tp: &TreePacking,
    msgs: MessageSet,
    record_sends: bool,
) -> Result<BroadcastTrace> {
    checked_packing(g, tp)?;
    let offsets = lane_offsets(tp);
    let lanes: Vec<TreeLane> = tp
        .trees
        .iter()
        .zip(offsets)
        .enumerate()
        .map(|(i, (t, off))| TreeLane::new(t, i, off))
        .collect();
    let parts = partition(msgs.k, tp.size);
    let mut rec = Recorder::new(g.node_count(), msgs.k, Some(g), record_sends);
    for m in 0..msgs.k {
        rec.hold(tp.source, m, 0);
    }
    run_downcast(&lanes, &parts, tp.weight.max(1), 1, &mut rec)?;
    Ok(rec.finish(tp.source))
}

/// Baseline: pipeline all `k` messages down one BFS tree of `g`.
pub fn naive_bfs_broadcast(g: &Graph, source: usize, msgs: MessageSet) -> Result<usize> {
    let tree = bfs(g, source)?;
    if !tree.is_spanning() {
        return Err(Error::Disconnected {
            root: source,
            unreachable: tree.unreachable().len(),
        });
    }
    downcast_single_tree(&tree, msgs.k)
}

/// Messages start spread over the nodes (`holdings[v]` lists `v`'s message
/// ids). Each message first climbs to the root in tree `m mod S`, with every
/// node forwarding its smallest pending id each step, then the usual
/// downcast runs.
pub fn multi_source_reduction(
    g: &Graph,
    tp: &TreePacking,
    holdings: &[Vec<usize>],
    record_sends: bool,
) -> Result<BroadcastTrace> {
    checked_packing(g, tp)?;
    let n = g.node_count();
    if holdings.len() != n {
        return Err(Error::invalid("holdings must list every node"));
    }
    let k: usize = holdings.iter().map(Vec::len).sum();
    MessageSet::new(k)?;
    let mut holder = vec![usize::MAX; k];
    for (v, held) in holdings.iter().enumerate() {
        for &m in held {
            if m >= k {
                return Err(Error::invalid(format!("message id {m} outside 0..{k}")));
            }
            if holder[m] != usize::MAX {
                return Err(Error::OverlappingHoldings(m));
            }
            holder[m] = v;
        }
    }
    let offsets = lane_offsets(tp);
    let lanes: Vec<TreeLane> = tp
        .trees
        .iter()
        .zip(offsets)
        .enumerate()
        .map(|(i, (t, off))| TreeLane::new(t, i, off))
        .collect();
    let parts = partition(k, tp.size);
    let phase_len = tp.weight.max(1);
    let mut rec = Recorder::new(n, k, Some(g), record_sends);
    for m in 0..k {
        rec.hold(holder[m], m, 0);
    }

    // Upcast: pending[i][v] holds lane i's messages waiting at v.
    let mut pending: Vec<HashMap<usize, BTreeSet<usize>>> = vec![HashMap::new(); lanes.len()];
    for (i, part) in parts.iter().enumerate() {
        for &m in part {
            if holder[m] != tp.source {
                pending[i].entry(holder[m]).or_default().insert(m);
            }
        }
    }
    let mut step = 1;
    loop {
        let mut arrivals: Vec<(usize, usize, usize)> = Vec::new();
        for (i, lane) in lanes.iter().enumerate() {
            let mut senders: Vec<usize> = pending[i].keys().copied().collect();
            senders.sort_unstable();
            for v in senders {
                let queue = pending[i].get_mut(&v).expect("sender has a queue");
                let m = queue.pop_first().expect("queues are never left empty");
                if queue.is_empty() {
                    pending[i].remove(&v);
                }
                let p = lane.tree.parent[v].expect("non-root nodes have parents");
                rec.queue(Send {
                    round: round_of(step, phase_len, lane.offset[v]),
                    edge_u: v as u32,
                    edge_v: p as u32,
                    tree_id: i as u32,
                    message_id: m as u32,
                });
                arrivals.push((i, p, m));
            }
        }
        if arrivals.is_empty() {
            break;
        }
        rec.flush()?;
        for (i, p, m) in arrivals {
            if p != tp.source {
                pending[i].entry(p).or_default().insert(m);
            }
        }
        step += 1;
    }
    run_downcast(&lanes, &parts, phase_len, step, &mut rec)?;
    Ok(rec.finish(tp.source))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobra::{run_multi_cobra, CobraConfig};
    use crate::graph::{complete, erdos_renyi, path, random_tree, star};
    use crate::packing::build_tree_packing;
    use crate::rng::RngSeed;

    fn er_packing(n: usize, p: f64, seed: u64) -> (Graph, TreePacking) {
        let g = erdos_renyi(n, p, RngSeed(seed)).unwrap();
        let r = g.regularize().unwrap();
        let delta = g.degree_stats().min;
        let a = run_multi_cobra(&r, 0, &CobraConfig::new(delta), RngSeed(seed)).unwrap();
        let tp = build_tree_packing(&r, &a, 0).unwrap();
        (g, tp)
    }

    #[test]
    fn pipeline_examples() {
        let p = bfs(&path(4).unwrap(), 0).unwrap();
        assert_eq!(downcast_single_tree(&p, 1).unwrap(), 3);
        let s = bfs(&star(6).unwrap(), 0).unwrap();
        assert_eq!(downcast_single_tree(&s, 5).unwrap(), 5);
    }

    #[test]
    fn pipeline_law_on_random_trees() {
        for seed in 0..200 {
            let g = random_tree(2 + (seed as usize * 7) % 90, RngSeed(seed)).unwrap();
            let root = seed as usize % g.node_count();
            let t = bfs(&g, root).unwrap();
            let k = 1 + (seed as usize * 13) % 40;
            assert_eq!(downcast_single_tree(&t, k).unwrap(), t.max_depth() + k - 1);
        }
    }

    #[test]
    fn naive_baseline() {
        let g = path(9).unwrap();
        assert_eq!(
            naive_bfs_broadcast(&g, 0, MessageSet::new(5).unwrap()).unwrap(),
            8 + 5 - 1
        );
        let k = complete(7).unwrap();
        assert_eq!(
            naive_bfs_broadcast(&k, 3, MessageSet::new(1).unwrap()).unwrap(),
            1
        );
    }

    #[test]
    fn single_tree_packing_matches_downcast() {
        let g = path(6).unwrap();
        let t = bfs(&g, 0).unwrap();
        let tp = TreePacking::from_trees(0, vec![t.clone()]);
        let trace = broadcast_over_packing(&g, &tp, MessageSet::new(4).unwrap(), false).unwrap();
        assert_eq!(trace.total_rounds, downcast_single_tree(&t, 4).unwrap());
        assert!(trace.is_saturated());
    }

    #[test]
    fn packing_broadcast_bounds() {
        let (g, tp) = er_packing(150, 0.15, 3);
        let delta = g.degree_stats().min;
        for k in [tp.size, 10 * delta, 3 * delta + 1] {
            let trace = broadcast_over_packing(&g, &tp, MessageSet::new(k).unwrap(), true).unwrap();
            assert!(trace.is_saturated());
            let per_tree = k.div_ceil(tp.size);
            assert!(trace.total_rounds <= tp.weight * (tp.diameter + per_tree));
            let d = crate::graph::diameter(&g).unwrap();
            assert!(trace.total_rounds >= d.max(k.div_ceil(delta)));
            if k == tp.size {
                assert!(trace.total_rounds <= tp.weight * tp.diameter + tp.weight);
            }
            // Receipt monotone along tree paths.
            for (i, t) in tp.trees.iter().enumerate() {
                for m in (i..k).step_by(tp.size) {
                    for (p, c) in t.edges() {
                        assert!(trace.receipt_round(c, m) > trace.receipt_round(p, m));
                    }
                }
            }
            // Independent recount of per-round per-directed-edge loads.
            let mut seen = std::collections::HashSet::new();
            for s in trace.sends.as_ref().unwrap() {
                assert!(seen.insert((s.round, s.edge_u, s.edge_v)));
            }
        }
    }

    #[test]
    fn invalid_packing_rejected() {
        let g = path(4).unwrap();
        let mut t = bfs(&g, 0).unwrap();
        t.parent[3] = None;
        let tp = TreePacking::from_trees(0, vec![t]);
        assert!(matches!(
            broadcast_over_packing(&g, &tp, MessageSet::new(2).unwrap(), false),
            Err(Error::InvalidPacking(_))
        ));
    }

    #[test]
    fn multi_source_all_at_source_matches_plain() {
        let (g, tp) = er_packing(80, 0.25, 4);
        let k = 37;
        let mut holdings = vec![Vec::new(); g.node_count()];
        holdings[0] = (0..k).collect();
        let multi = multi_source_reduction(&g, &tp, &holdings, false).unwrap();
        let plain = broadcast_over_packing(&g, &tp, MessageSet::new(k).unwrap(), false).unwrap();
        assert_eq!(multi.total_rounds, plain.total_rounds);
    }

    #[test]
    fn multi_source_single_leaf_message() {
        let (g, tp) = er_packing(80, 0.25, 5);
        let t = &tp.trees[0];
        let leaf = (0..80).max_by_key(|&v| t.depth[v]).unwrap();
        let mut holdings = vec![Vec::new(); 80];
        holdings[leaf] = vec![0];
        let trace = multi_source_reduction(&g, &tp, &holdings, false).unwrap();
        assert!(trace.is_saturated());
        assert!(trace.total_rounds <= tp.weight * 2 * tp.diameter);
    }

    #[test]
    fn multi_source_random_holdings_saturate() {
        use rand::Rng;
        let (g, tp) = er_packing(200, 0.2, 6);
        let mut rng = RngSeed(6).rng();
        let k = 500;
        let mut holdings = vec![Vec::new(); 200];
        for m in 0..k {
            holdings[rng.random_range(0..200)].push(m);
        }
        let trace = multi_source_reduction(&g, &tp, &holdings, true).unwrap();
        assert!(trace.is_saturated());
        let bound = tp.weight * (tp.diameter + k.div_ceil(tp.size));
        assert!(trace.total_rounds <= 2 * bound + tp.diameter * tp.weight);
        let mut seen = std::collections::HashSet::new();
        for s in trace.sends.as_ref().unwrap() {
            assert!(seen.insert((s.round, s.edge_u, s.edge_v)));
        }
    }

    #[test]
    fn overlapping_holdings_rejected() {
        let (g, tp) = er_packing(40, 0.4, 1);
        let mut holdings = vec![Vec::new(); 40];
        holdings[1] = vec![0, 1];
        holdings[2] = vec![1];
        assert!(matches!(
            multi_source_reduction(&g, &tp, &holdings, false),
            Err(Error::OverlappingHoldings(1))
        ));
    }

    #[test]
    fn csv_trace() {
        let g = path(3).unwrap();
        let tp = TreePacking::from_trees(0, vec![bfs(&g, 0).unwrap()]);
        let trace = broadcast_over_packing(&g, &tp, MessageSet::new(2).unwrap(), true).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "round,edge_u,edge_v,tree_id,message_id\n1,0,1,0,0\n2,0,1,0,1\n2,1,2,0,0\n3,1,2,0,1\n"
        );
    }
}
