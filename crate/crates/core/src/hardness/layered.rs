use std::collections::{HashMap, HashSet};
use std::ops::Range;

use super::setsplit::LayeredSchedule;
use super::BandwidthGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Unit-bandwidth version of a layered bandwidth graph for `n_msgs`
/// messages.
#[derive(Debug, Clone)]
pub struct LayeredGadget {
    pub graph: Graph,
    pub n_msgs: usize,
    pub depth: usize,
    pub layers: Vec<usize>,
    pub s_prime: usize,
    pub s_in: Range<usize>,
    /// `v_out` per original node; the source maps to `s_out`, last-layer
    /// nodes to `None`.
    pub out_groups: Vec<Option<Range<usize>>>,
    /// `v_{u-in}` per edge `(u, v)` into a middle layer.
    pub in_groups: HashMap<(usize, usize), Range<usize>>,
    /// The single node kept for each last-layer node.
    pub last: Vec<Option<usize>>,
}

/// Middle-layer nodes become `n_msgs`-node out-groups fed through one
/// in-group per incoming edge; the source becomes `s'` plus `K_{n,n}`; the
/// last layer stays single.
pub fn layered_transform(bg: &BandwidthGraph, n_msgs: usize) -> Result<LayeredGadget> {
    if n_msgs == 0 {
        return Err(Error::invalid("need at least one message"));
    }
    let layers = bg.layers()?;
    for &(u, v, b) in &bg.edges {
        if layers[u].abs_diff(layers[v]) != 1 {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) joins layers {} and {}",
                layers[u], layers[v]
            )));
        }
        if b as usize > n_msgs {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) bandwidth {b} exceeds {n_msgs} messages"
            )));
        }
    }
    let depth = layers.iter().copied().max().unwrap_or(0);
    if depth == 0 {
        return Err(Error::invalid("layered graph needs at least two layers"));
    }
    let n = n_msgs;
    let mut next = 0;
    let mut alloc = |size: usize| {
        let r = next..next + size;
        next += size;
        r
    };
    let s_prime = alloc(1).start;
    let s_in = alloc(n);
    let mut out_groups = vec![None; bg.node_count];
    out_groups[bg.source] = Some(alloc(n));
    for v in 0..bg.node_count {
        if v != bg.source && layers[v] < depth {
            out_groups[v] = Some(alloc(n));
        }
    }
    let mut forward: Vec<(usize, usize, usize)> = bg
        .edges
        .iter()
        .map(|&(u, v, b)| {
            if layers[u] < layers[v] {
                (u, v, b as usize)
            } else {
                (v, u, b as usize)
            }
        })
        .collect();
    forward.sort_unstable();
    let mut in_groups = HashMap::new();
    for &(u, v, b) in &forward {
        if layers[v] < depth {
            in_groups.insert((u, v), alloc(b));
        }
    }
    let mut last = vec![None; bg.node_count];
    for v in 0..bg.node_count {
        if layers[v] == depth {
            last[v] = Some(alloc(1).start);
        }
    }

    let mut edges = Vec::new();
    edges.extend(s_in.clone().map(|x| (s_prime, x)));
    let s_out = out_groups[bg.source].clone().unwrap();
    for a in s_in.clone() {
        edges.extend(s_out.clone().map(|b| (a, b)));
    }
    for &(u, v, b) in &forward {
        let from = out_groups[u].clone().expect("edges leave non-final layers");
        if let Some(group) = in_groups.get(&(u, v)) {
            edges.extend(from.clone().zip(group.clone()));
            let to = out_groups[v].clone().unwrap();
            for a in group.clone() {
                edges.extend(to.clone().map(|c| (a, c)));
            }
        } else {
            let t = last[v].unwrap();
            edges.extend(from.take(b).map(|a| (a, t)));
        }
    }
    Ok(LayeredGadget {
        graph: Graph::from_edges(next, edges)?,
        n_msgs,
        depth,
        layers,
        s_prime,
        s_in,
        out_groups,
        in_groups,
        last,
    })
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Replays a schedule of the layered graph on the transformed graph in
/// `2l + 1` unit rounds, one message per directed edge per round, and
/// returns what every transformed node knows at the end.
pub fn simulate_translated_schedule(
    gadget: &LayeredGadget,
    schedule: &LayeredSchedule,
) -> Result<Vec<u64>> {
    let n = gadget.n_msgs;
    if schedule.message_count != n || n > 64 {
        return Err(Error::invalid(
            "schedule and gadget disagree on the message count",
        ));
    }
    if schedule.rounds.len() != gadget.depth {
        return Err(Error::invalid(format!(
            "schedule has {} rounds, the graph is {} layers deep",
            schedule.rounds.len(),
            gadget.depth
        )));
    }
    let mut rounds: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    rounds.push(
        gadget
            .s_in
            .clone()
            .enumerate()
            .map(|(i, x)| (gadget.s_prime, x, i))
            .collect(),
    );
    let s_out = gadget.out_groups.iter().flatten().next().unwrap().clone();
    rounds.push(
        gadget
            .s_in
            .clone()
            .enumerate()
            .flat_map(|(i, x)| s_out.clone().map(move |y| (x, y, i)))
            .collect(),
    );
    for (r, sends) in schedule.rounds.iter().enumerate() {
        let mut hop = Vec::new();
        let mut relay = Vec::new();
        for &(u, v, msgs) in sends {
            let from = gadget.out_groups[u]
                .clone()
                .ok_or_else(|| Error::invalid(format!("{u} has no out-group")))?;
            let msgs = members(msgs);
            if r + 1 < gadget.depth {
                let group = gadget
                    .in_groups
                    .get(&(u, v))
                    .ok_or_else(|| Error::invalid(format!("no in-group for ({u}, {v})")))?;
                let to = gadget.out_groups[v].clone().unwrap();
                for ((a, b), &m) in from.zip(group.clone()).zip(&msgs) {
                    hop.push((a, b, m));
                    relay.extend(to.clone().map(|c| (b, c, m)));
                }
            } else {
                let t = gadget.last[v]
                    .ok_or_else(|| Error::invalid(format!("{v} is not in the last layer")))?;
                hop.extend(from.zip(&msgs).map(|(a, &m)| (a, t, m)));
            }
        }
        rounds.push(hop);
        if r + 1 < gadget.depth {
            rounds.push(relay);
        }
    }

    let g = &gadget.graph;
    let mut known = vec![0u64; g.node_count()];
    known[gadget.s_prime] = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    for (r, sends) in rounds.iter().enumerate() {
        let start = known.clone();
        let mut used = HashSet::new();
        for &(a, b, m) in sends {
            if g.edge_id(a, b).is_none() {
                return Err(Error::invalid(format!(
                    "round {}: ({a}, {b}) is not an edge",
                    r + 1
                )));
            }
            if !used.insert((a, b)) {
                return Err(Error::invalid(format!(
                    "round {}: ({a}, {b}) used twice",
                    r + 1
                )));
            }
            if start[a] >> m & 1 == 0 {
                return Err(Error::invalid(format!(
                    "round {}: {a} lacks message {m}",
                    r + 1
                )));
            }
            known[b] |= 1 << m;
        }
    }
    debug_assert_eq!(rounds.len(), 2 * gadget.depth + 1);
    Ok(known)
}

#[cfg(test)]
mod tests {
    use super::super::setsplit::{
        build_setsplit_reduction, decide_saturation_round4, simulate_layered_schedule,
        split_schedule, ReductionInstance,
    };
    use super::*;

    #[test]
    fn single_edge_degenerates_to_a_path() {
        let bg = BandwidthGraph::new(2, vec![(0, 1, 1)], 0).unwrap();
        let g = layered_transform(&bg, 1).unwrap();
        assert_eq!(g.graph, crate::graph::path(4).unwrap());
    }

    #[test]
    fn three_message_group_sizes() {
        let bg =
            BandwidthGraph::new(4, vec![(0, 1, 2), (0, 2, 3), (1, 3, 1), (2, 3, 2)], 0).unwrap();
        let g = layered_transform(&bg, 3).unwrap();
        assert_eq!(g.in_groups[&(0, 1)].len(), 2);
        assert_eq!(g.in_groups[&(0, 2)].len(), 3);
        assert!(g.out_groups[1..3]
            .iter()
            .all(|o| o.as_ref().unwrap().len() == 3));
        assert_eq!(g.graph.node_count(), 1 + 3 + 3 + 6 + 5 + 1);
        assert_eq!(g.graph.degree(g.last[3].unwrap()), 3);
    }

    #[test]
    fn rejects_non_layered() {
        let bg = BandwidthGraph::new(3, vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)], 0).unwrap();
        assert!(layered_transform(&bg, 2).is_err());
        let wide = BandwidthGraph::new(2, vec![(0, 1, 5)], 0).unwrap();
        assert!(layered_transform(&wide, 2).is_err());
    }

    #[test]
    fn saturating_schedule_carries_over() {
        let ri = ReductionInstance::new(4, vec![vec![0, 1], vec![1, 2, 3], vec![0, 3]], 2).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        let d = decide_saturation_round4(&red).unwrap();
        let s1 = d.witness.unwrap().iter().fold(0u64, |m, &x| m | 1 << x);
        let schedule = split_schedule(&red, s1);
        let in_g = simulate_layered_schedule(&red.graph, &red.layers, &schedule).unwrap();
        let gadget = layered_transform(&red.graph, 4).unwrap();
        let in_gp = simulate_translated_schedule(&gadget, &schedule).unwrap();
        for v in 0..red.graph.node_count {
            let rep = gadget.last[v]
                .or(gadget.out_groups[v].as_ref().map(|r| r.start))
                .unwrap();
            assert_eq!(in_gp[rep], in_g[v], "node {v}");
        }
        assert!(red
            .targets()
            .all(|t| in_gp[gadget.last[t].unwrap()] == 0b1111));
    }
}
