use serde::Serialize;

use super::flow::undirected_max_flow;
use super::BandwidthGraph;
use crate::error::{Error, Result};

/// Small diameter, min cut about `k`, yet `v1` needs about `√k` rounds.
///
/// Node 0 is `s`, node 1 is `v1`, nodes `2..2 + r` are the unit relays `u_i`
/// and the rest are the chain `v_{r+1} .. v_{2r}` (with `r = √k`).
#[derive(Debug, Clone, Serialize)]
pub struct SqrtKInstance {
    pub graph: BandwidthGraph,
    pub k: usize,
    pub root_k: usize,
    pub v1: usize,
    pub chain: Vec<usize>,
    pub diameter: usize,
    /// `s - v1` max-flow.
    pub min_cut_s_v1: i64,
    /// `s - v1` max-flow without the first two chain edges.
    pub residual_cut: i64,
}

pub fn build_sqrtk_instance(k: usize) -> Result<SqrtKInstance> {
    let r = (k as f64).sqrt().round() as usize;
    if k < 4 || r * r != k {
        return Err(Error::invalid(format!(
            "k = {k} must be a perfect square >= 4"
        )));
    }
    let (s, v1) = (0, 1);
    let relays: Vec<usize> = (2..2 + r).collect();
    let chain: Vec<usize> = (2 + r..2 + 2 * r).collect();
    let mut edges = Vec::new();
    for &u in &relays {
        edges.push((s, u, 1));
        edges.push((u, v1, 1));
    }
    let wide = k as u64;
    edges.push((s, chain[0], wide));
    for w in chain.windows(2) {
        edges.push((w[0], w[1], wide));
    }
    edges.push((*chain.last().unwrap(), v1, wide));
    for &c in &chain[1..] {
        edges.push((s, c, 1));
    }
    let graph = BandwidthGraph::new(2 + 2 * r, edges, s)?;

    let diameter = graph.diameter()?;
    let caps = graph.capacities();
    let min_cut_s_v1 = undirected_max_flow(graph.node_count, &caps, s, v1);
    let cut_away = [
        (s, chain[0]),
        (chain[0], chain.get(1).copied().unwrap_or(v1)),
    ];
    let residual: Vec<_> = caps
        .iter()
        .copied()
        .filter(|&(u, v, _)| !cut_away.contains(&(u, v)))
        .collect();
    let residual_cut = undirected_max_flow(graph.node_count, &residual, s, v1);

    if diameter > 3 {
        return Err(Error::invalid(format!("diameter {diameter} exceeds 3")));
    }
    if min_cut_s_v1 < k as i64 {
        return Err(Error::invalid(format!(
            "min cut {min_cut_s_v1} below k = {k}"
        )));
    }
    if residual_cut > 2 * r as i64 {
        return Err(Error::invalid(format!(
            "residual cut {residual_cut} exceeds 2√k"
        )));
    }
    Ok(SqrtKInstance {
        graph,
        k,
        root_k: r,
        v1,
        chain,
        diameter,
        min_cut_s_v1,
        residual_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{check_certificate, time_expanded_saturation};
    use super::*;

    #[test]
    fn k4_shape() {
        let inst = build_sqrtk_instance(4).unwrap();
        assert_eq!(inst.graph.node_count, 6);
        assert_eq!(inst.chain.len(), 2);
        assert_eq!(inst.min_cut_s_v1, 4 + 2);
        assert_eq!(inst.residual_cut, 3);
        let sat = time_expanded_saturation(&inst.graph, 1, 4).unwrap();
        assert!(sat.min_rounds >= 2);
        check_certificate(&inst.graph, &sat).unwrap();
    }

    #[test]
    fn saturation_needs_root_k_rounds() {
        for k in [4usize, 9, 16, 25] {
            let inst = build_sqrtk_instance(k).unwrap();
            assert!(inst.diameter <= 3);
            assert_eq!(inst.residual_cut, 2 * inst.root_k as i64 - 1);
            let sat = time_expanded_saturation(&inst.graph, inst.v1, k).unwrap();
            assert!(sat.min_rounds >= inst.root_k, "k = {k}: {}", sat.min_rounds);
            assert!(k as f64 / (inst.min_cut_s_v1 as f64) <= 1.0);
        }
    }

    #[test]
    fn rejects_non_squares() {
        assert!(build_sqrtk_instance(8).is_err());
        assert!(build_sqrtk_instance(1).is_err());
    }
}
