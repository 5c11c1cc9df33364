use serde::Serialize;

use super::flow::{FlowNetwork, INFINITE};
use super::BandwidthGraph;
use crate::error::{Error, Result};

/// Fewest rounds to deliver `k` distinct messages from the source to `sink`,
/// with a per-round flow witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturationResult {
    pub sink: usize,
    pub k: usize,
    pub min_rounds: usize,
    /// `flow_certificate[r]`: `(u, v, count)` messages moved `u -> v` in
    /// round `r + 1`, netted per edge.
    pub flow_certificate: Vec<Vec<(usize, usize, u64)>>,
}

struct Expanded {
    net: FlowNetwork,
    /// (round, u, v, arc id) for every bandwidth arc.
    moves: Vec<(usize, usize, usize, usize)>,
}

fn expand(bg: &BandwidthGraph, rounds: usize) -> Expanded {
    let n = bg.node_count;
    let mut net = FlowNetwork::new(n * (rounds + 1));
    let mut moves = Vec::new();
    for r in 0..rounds {
        for v in 0..n {
            net.add_arc(r * n + v, (r + 1) * n + v, INFINITE);
        }
        for &(u, v, b) in &bg.edges {
            for (x, y) in [(u, v), (v, u)] {
                let id = net.add_arc(r * n + x, (r + 1) * n + y, b as i64);
                moves.push((r, x, y, id));
            }
        }
    }
    Expanded { net, moves }
}

/// Messages deliverable to `sink` within `rounds`, capped at `k`.
pub fn flow_within(bg: &BandwidthGraph, sink: usize, k: usize, rounds: usize) -> i64 {
    let mut e = expand(bg, rounds);
    e.net
        .max_flow_limited(bg.source, rounds * bg.node_count + sink, k as i64)
}

/// Searches `t = 0, 1, ...` for the first time-expanded network carrying `k`
/// units to `sink`. Connected graphs always finish by `n + k` rounds.
pub fn time_expanded_saturation(
    bg: &BandwidthGraph,
    sink: usize,
    k: usize,
) -> Result<SaturationResult> {
    if sink >= bg.node_count {
        return Err(Error::NodeOutOfRange {
            node: sink,
            node_count: bg.node_count,
        });
    }
    let cap = bg.node_count + k;
    for t in 0..=cap {
        if sink == bg.source || k == 0 {
            return Ok(SaturationResult {
                sink,
                k,
                min_rounds: 0,
                flow_certificate: Vec::new(),
            });
        }
        let mut e = expand(bg, t);
        let got = e
            .net
            .max_flow_limited(bg.source, t * bg.node_count + sink, k as i64);
        if got < k as i64 {
            continue;
        }
        let mut rounds = vec![Vec::new(); t];
        for &(r, x, y, id) in &e.moves {
            if x > y {
                continue;
            }
            let there = e.net.flow_on(id);
            let back = e.moves_back(r, x, y);
            let net = there - back;
            if net > 0 {
                rounds[r].push((x, y, net as u64));
            } else if net < 0 {
                rounds[r].push((y, x, (-net) as u64));
            }
        }
        return Ok(SaturationResult {
            sink,
            k,
            min_rounds: t,
            flow_certificate: rounds,
        });
    }
    Err(Error::BudgetExceeded(format!(
        "sink {sink} not saturated within {cap} rounds"
    )))
}

impl Expanded {
    fn moves_back(&self, r: usize, x: usize, y: usize) -> i64 {
        self.moves
            .iter()
            .find(|&&(rr, a, b, _)| rr == r && a == y && b == x)
            .map(|&(_, _, _, id)| self.net.flow_on(id))
            .unwrap_or(0)
    }
}

/// Replays the certificate as store-and-forward counts: each round a node
/// sends at most what it holds, every edge carries at most its bandwidth,
/// and the sink ends with `k`.
pub fn check_certificate(bg: &BandwidthGraph, res: &SaturationResult) -> Result<()> {
    if res.flow_certificate.len() != res.min_rounds {
        return Err(Error::invalid("certificate length differs from min_rounds"));
    }
    let mut stock = vec![0u64; bg.node_count];
    stock[bg.source] = res.k as u64;
    for (r, flows) in res.flow_certificate.iter().enumerate() {
        let mut out = vec![0u64; bg.node_count];
        let mut inc = vec![0u64; bg.node_count];
        for &(u, v, f) in flows {
            let b = bg.bandwidth(u, v).ok_or_else(|| {
                Error::invalid(format!("round {}: ({u}, {v}) is not an edge", r + 1))
            })?;
            if f > b {
                return Err(Error::invalid(format!(
                    "round {}: {f} messages over ({u}, {v}) with bandwidth {b}",
                    r + 1
                )));
            }
            out[u] += f;
            inc[v] += f;
        }
        for v in 0..bg.node_count {
            if out[v] > stock[v] {
                return Err(Error::invalid(format!(
                    "round {}: node {v} sends {} holding {}",
                    r + 1,
                    out[v],
                    stock[v]
                )));
            }
            stock[v] = stock[v] - out[v] + inc[v];
        }
    }
    if stock[res.sink] < res.k as u64 {
        return Err(Error::invalid(format!(
            "sink {} ends with {} of {}",
            res.sink, stock[res.sink], res.k
        )));
    }
    Ok(())
}
