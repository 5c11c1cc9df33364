//! Mixing time of the lazy walk on directed edges.
//!
//! A state is a directed slot `x -> y` (one per unit of multiplicity, one per
//! self-loop). The walk stays put with probability 1/2 and otherwise moves to
//! a uniform out-slot of the head `y`. The stationary law is uniform over the
//! `M` slots.
//!
//! Started from a point mass on `u -> v`, the distribution after `t` steps is
//! `2^-t` on the start slot plus `s_t(x)/slot(x)` on every out-slot of `x`,
//! where `s_0 = 0` and
//!
//! ```text
//! s_{t+1}(y) = s_t(y)/2 + (1/2) Σ_{x ~ y} mult(x,y) s_t(x)/slot(x) + 2^-(t+1) [y = v]
//! ```
//!
//! (self-loops count as neighbors of their own node). So one node-sized vector
//! per head `v` gives the exact distance for every start slot ending at `v`;
//! the worst tail `u` is the one with the largest `s_t(u)/slot(u)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, serde::Deserialize)]
pub struct MixingOptions {
    /// Target distance; defaults to `n^-2`.
    pub tolerance: Option<f64>,
    /// Step cap; defaults to `10 n`.
    pub t_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingTime {
    pub t: usize,
    /// Worst-start distance at step `t`.
    pub deviation: f64,
    /// Start slot `(tail, head)` attaining it.
    pub worst_start: (usize, usize),
}

/// Smallest `t` at which every start slot is within `tolerance` of uniform
/// in the π-weighted 2-norm `‖P^t(x,·)/π - 1‖_{2,π}`.
pub fn mixing_time_empirical(g: &Graph, opts: &MixingOptions) -> Result<MixingTime> {
    let n = g.node_count();
    let tolerance = opts.tolerance.unwrap_or(1.0 / (n as f64 * n as f64));
    let t_max = opts.t_max.unwrap_or(10 * n);
    if !(tolerance > 0.0) {
        return Err(Error::invalid("mixing tolerance must be positive"));
    }
    if let Some(v) = (0..n).find(|&v| g.slot_count(v) == 0) {
        return Err(Error::IsolatedNode(v));
    }
    if !g.is_connected() {
        let reached = crate::graph::bfs(g, 0)?.reached_count();
        return Err(Error::Disconnected {
            root: 0,
            unreachable: n - reached,
        });
    }
    let slots: Vec<f64> = (0..n).map(|v| g.slot_count(v) as f64).collect();
    let loops: Vec<f64> = (0..n).map(|v| g.self_loops(v) as f64).collect();
    let volume: f64 = slots.iter().sum();
    let pi = 1.0 / volume;

    // s[v * n + x]: mass on the out-slots of x for the run whose start head is v.
    let mut s = vec![0.0f64; n * n];
    let mut next = vec![0.0f64; n * n];
    let mut flow = vec![0.0f64; n];
    let mut a = 1.0f64;
    let mut t = 0usize;
    loop {
        let (deviation, worst_start) = worst_deviation(g, &s, a, &slots, pi, volume);
        if deviation <= tolerance {
            return Ok(MixingTime {
                t,
                deviation,
                worst_start,
            });
        }
        if t == t_max {
            return Err(Error::MixingCapExceeded {
                t_max,
                tolerance,
                deviation,
            });
        }
        for v in 0..n {
            let row = &s[v * n..(v + 1) * n];
            for x in 0..n {
                flow[x] = row[x] / slots[x];
            }
            let out = &mut next[v * n..(v + 1) * n];
            for y in 0..n {
                let mut inflow = loops[y] * flow[y];
                for (x, m) in g.adjacency(y) {
                    inflow += m as f64 * flow[x];
                }
                out[y] = 0.5 * row[y] + 0.5 * inflow;
            }
            out[v] += 0.5 * a;
        }
        std::mem::swap(&mut s, &mut next);
        a *= 0.5;
        t += 1;
    }
}

fn worst_deviation(
    g: &Graph,
    s: &[f64],
    a: f64,
    slots: &[f64],
    pi: f64,
    volume: f64,
) -> (f64, (usize, usize)) {
    let n = g.node_count();
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for v in 0..n {
        let row = &s[v * n..(v + 1) * n];
        let base: f64 = (0..n)
            .map(|x| {
                let d = row[x] / slots[x] - pi;
                slots[x] * d * d
            })
            .sum();
        let tails = g
            .neighbors(v)
            .iter()
            .map(|&u| u as usize)
            .chain((g.self_loops(v) > 0).then_some(v));
        let mut tail = v;
        let mut top = f64::NEG_INFINITY;
        for u in tails {
            let r = row[u] / slots[u];
            if r > top {
                top = r;
                tail = u;
            }
        }
        let r = top - pi;
        let sq = base - r * r + (a + r) * (a + r);
        let dev = (volume * sq.max(0.0)).sqrt();
        if dev > best.0 {
            best = (dev, (tail, v));
        }
    }
    (best.0, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, erdos_renyi, ring_of_cliques};
    use crate::rng::RngSeed;

    /// Materializes the full slot chain and iterates every point mass.
    fn brute_force_deviations(g: &Graph, steps: usize) -> Vec<f64> {
        let n = g.node_count();
        let mut states: Vec<(usize, usize)> = Vec::new();
        for x in 0..n {
            for (y, m) in g.adjacency(x) {
                for _ in 0..m {
                    states.push((x, y));
                }
            }
            for _ in 0..g.self_loops(x) {
                states.push((x, x));
            }
        }
        let count = states.len();
        let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &(x, _)) in states.iter().enumerate() {
            out_of[x].push(i);
        }
        let pi = 1.0 / count as f64;
        let mut worst = vec![0.0f64; steps + 1];
        for start in 0..count {
            let mut q = vec![0.0; count];
            q[start] = 1.0;
            for t in 0..=steps {
                let dev = (q.iter().map(|p| (p - pi) * (p - pi)).sum::<f64>() / pi).sqrt();
                worst[t] = worst[t].max(dev);
                let mut nq = vec![0.0; count];
                for (i, &(_, y)) in states.iter().enumerate() {
                    nq[i] += 0.5 * q[i];
                    let share = 0.5 * q[i] / out_of[y].len() as f64;
                    for &j in &out_of[y] {
                        nq[j] += share;
                    }
                }
                q = nq;
            }
        }
        worst
    }

    fn reduced_deviation(g: &Graph, steps: usize) -> f64 {
        // Tolerance 0 is rejected, so use a cap and read the error.
        match mixing_time_empirical(
            g,
            &MixingOptions {
                tolerance: Some(1e-300),
                t_max: Some(steps),
            },
        ) {
            Err(Error::MixingCapExceeded { deviation, .. }) => deviation,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matches_full_chain_oracle() {
        let multigraph =
            Graph::from_edges(4, [(0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (2, 2)]).unwrap();
        let graphs = vec![
            cycle(5).unwrap(),
            complete(4).unwrap(),
            erdos_renyi(12, 0.4, RngSeed(3)).unwrap(),
            cycle(6).unwrap().regularize().unwrap(),
            crate::graph::star(3).unwrap().regularize().unwrap(),
            multigraph,
        ];
        for g in &graphs {
            let oracle = brute_force_deviations(g, 12);
            for (t, &want) in oracle.iter().enumerate() {
                let got = reduced_deviation(g, t);
                assert!(
                    (got - want).abs() < 1e-9 * want.max(1.0),
                    "t={t}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn k2_mixes_in_one_step() {
        // Lazy chain on the two directed edges is [[1/2,1/2],[1/2,1/2]].
        let k2 = complete(2).unwrap();
        let opts = |tol| MixingOptions {
            tolerance: Some(tol),
            t_max: None,
        };
        assert_eq!(mixing_time_empirical(&k2, &opts(0.25)).unwrap().t, 1);
        assert_eq!(mixing_time_empirical(&k2, &opts(1e-12)).unwrap().t, 1);
        let at_one = mixing_time_empirical(&k2, &opts(1.0)).unwrap();
        assert_eq!((at_one.t, at_one.deviation), (0, 1.0));
    }

    #[test]
    fn tolerance_one_needs_positive_t_for_larger_graphs() {
        let g = cycle(9).unwrap();
        let r = mixing_time_empirical(
            &g,
            &MixingOptions {
                tolerance: Some(1.0),
                t_max: None,
            },
        )
        .unwrap();
        assert!(r.t > 0);
        let oracle = brute_force_deviations(&g, r.t);
        assert!(oracle[r.t] <= 1.0 && oracle[r.t - 1] > 1.0);
    }

    #[test]
    fn cycle_mixes_slower_than_dense_random_graph() {
        let opts = MixingOptions {
            tolerance: None,
            t_max: Some(100_000),
        };
        let c = mixing_time_empirical(&cycle(64).unwrap(), &opts).unwrap().t;
        for seed in 0..3 {
            let g = erdos_renyi(64, 0.3, RngSeed(seed)).unwrap();
            let t = mixing_time_empirical(&g, &opts).unwrap().t;
            assert!(c > t, "seed {seed}: cycle {c} vs ER {t}");
        }
    }

    #[test]
    fn cap_is_reported() {
        let r = mixing_time_empirical(
            &cycle(30).unwrap(),
            &MixingOptions {
                tolerance: None,
                t_max: Some(5),
            },
        );
        assert!(matches!(r, Err(Error::MixingCapExceeded { t_max: 5, .. })));
    }

    #[test]
    fn ring_of_cliques_mixes() {
        let g = ring_of_cliques(6, 4, false).unwrap();
        assert!(mixing_time_empirical(&g, &MixingOptions::default()).is_ok());
    }
}
