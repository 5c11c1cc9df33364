use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BandwidthGraph;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

pub const BRUTE_FORCE_MAX: usize = 20;
pub const DECIDE_MAX: usize = 12;

/// Can `0..ground_set_size` be split into parts of sizes `n1` and `n2` so
/// that no family member falls inside one part?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionInstance {
    pub ground_set_size: usize,
    pub family: Vec<Vec<usize>>,
    pub n1: usize,
    pub n2: usize,
}

impl ReductionInstance {
    pub fn new(ground_set_size: usize, family: Vec<Vec<usize>>, n1: usize) -> Result<Self> {
        if ground_set_size == 0 || ground_set_size > 64 {
            return Err(Error::invalid("ground set size must be in 1..=64"));
        }
        if n1 > ground_set_size {
            return Err(Error::invalid(format!(
                "n1 = {n1} exceeds |S| = {ground_set_size}"
            )));
        }
        for (j, f) in family.iter().enumerate() {
            if f.is_empty() {
                return Err(Error::invalid(format!("family member {j} is empty")));
            }
            let mut seen = 0u64;
            for &x in f {
                if x >= ground_set_size {
                    return Err(Error::invalid(format!(
                        "family member {j} has element {x} outside S"
                    )));
                }
                if seen >> x & 1 == 1 {
                    return Err(Error::invalid(format!("family member {j} repeats {x}")));
                }
                seen |= 1 << x;
            }
        }
        Ok(ReductionInstance {
            ground_set_size,
            family,
            n1,
            n2: ground_set_size - n1,
        })
    }

    fn masks(&self) -> Vec<u64> {
        self.family
            .iter()
            .map(|f| f.iter().fold(0u64, |m, &x| m | 1 << x))
            .collect()
    }

    fn full(&self) -> u64 {
        full_mask(self.ground_set_size)
    }

    pub fn is_split_by(&self, s1: u64) -> bool {
        let s2 = self.full() & !s1;
        self.masks().iter().all(|&f| f & s1 != 0 && f & s2 != 0)
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Subsets of `0..n` with `size` members, in increasing mask order.
fn masks_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    (0u64..1 << n).filter(move |m| m.count_ones() as usize == size)
}

/// Random instance with `m` nonempty members and `n1` in `1..n`.
pub fn random_instance(
    ground_set_size: usize,
    m: usize,
    seed: RngSeed,
) -> Result<ReductionInstance> {
    if ground_set_size < 2 {
        return Err(Error::invalid("need |S| >= 2"));
    }
    let mut rng = seed.rng();
    let mut family = Vec::with_capacity(m);
    while family.len() < m {
        let f: Vec<usize> = (0..ground_set_size)
            .filter(|_| rng.random_bool(0.5))
            .collect();
        if !f.is_empty() {
            family.push(f);
        }
    }
    let n1 = rng.random_range(1..ground_set_size);
    ReductionInstance::new(ground_set_size, family, n1)
}

pub fn brute_force_set_splitting(ri: &ReductionInstance) -> Result<bool> {
    if ri.ground_set_size > BRUTE_FORCE_MAX {
        return Err(Error::BudgetExceeded(format!(
            "brute force handles |S| <= {BRUTE_FORCE_MAX}"
        )));
    }
    Ok(masks_of_size(ri.ground_set_size, ri.n1).any(|s1| ri.is_split_by(s1)))
}

/// The layered bandwidth graph of the reduction, with named node roles.
#[derive(Debug, Clone, Serialize)]
pub struct SetSplitReduction {
    pub instance: ReductionInstance,
    pub graph: BandwidthGraph,
    pub layers: Vec<usize>,
    /// `v_i`, holder of message `i` after round one.
    pub v: Vec<usize>,
    /// One node per family member.
    pub f: Vec<usize>,
    /// `S_1`, `S_2` and the relay in front of each.
    pub parts: [usize; 2],
    pub part_relays: [usize; 2],
    pub u: Vec<[usize; 2]>,
    pub t: Vec<[usize; 2]>,
    /// Three relays on the `s - t` edge, empty when its bandwidth is zero.
    pub t_paths: Vec<[Vec<usize>; 2]>,
}

impl SetSplitReduction {
    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        self.t.iter().flatten().copied()
    }

    pub fn depth(&self) -> usize {
        self.layers.iter().copied().max().unwrap_or(0)
    }
}

pub fn build_setsplit_reduction(ri: &ReductionInstance) -> Result<SetSplitReduction> {
    let n = ri.ground_set_size;
    if ri.n1 + ri.n2 != n {
        return Err(Error::invalid("n1 + n2 must equal |S|"));
    }
    if ri.n1 == 0 || ri.n2 == 0 {
        return Err(Error::invalid("both parts need at least one element"));
    }
    let m = ri.family.len();
    let mut next = 1;
    let mut take = |count: usize| {
        let ids: Vec<usize> = (next..next + count).collect();
        next += count;
        ids
    };
    let v = take(n);
    let f = take(m);
    let pr = take(2);
    let pt = take(2);
    let u: Vec<[usize; 2]> = take(2 * m).chunks(2).map(|c| [c[0], c[1]]).collect();
    let t: Vec<[usize; 2]> = take(2 * m).chunks(2).map(|c| [c[0], c[1]]).collect();
    let sizes = [ri.n1, ri.n2];
    let mut t_paths = Vec::with_capacity(m);
    for _ in 0..m {
        let mut pair: [Vec<usize>; 2] = Default::default();
        for (j, p) in pair.iter_mut().enumerate() {
            if n - sizes[j] - 1 > 0 {
                *p = take(3);
            }
        }
        t_paths.push(pair);
    }
    let total = next;

    let mut layers = vec![0; total];
    let mut edges = Vec::new();
    for (i, &vi) in v.iter().enumerate() {
        layers[vi] = 1;
        edges.push((0, vi, 1));
        for (j, fam) in ri.family.iter().enumerate() {
            if fam.contains(&i) {
                edges.push((vi, f[j], 1));
            }
        }
    }
    for j in 0..2 {
        layers[pr[j]] = 1;
        layers[pt[j]] = 2;
        let b = sizes[j] as u64;
        edges.push((0, pr[j], b));
        edges.push((pr[j], pt[j], b));
    }
    for (i, fam) in ri.family.iter().enumerate() {
        layers[f[i]] = 2;
        for j in 0..2 {
            layers[u[i][j]] = 3;
            layers[t[i][j]] = 4;
            edges.push((f[i], u[i][j], fam.len() as u64));
            edges.push((pt[j], u[i][j], sizes[j] as u64));
            edges.push((u[i][j], t[i][j], n as u64));
            let path = &t_paths[i][j];
            if !path.is_empty() {
                let b = (n - sizes[j] - 1) as u64;
                let hops = [0, path[0], path[1], path[2], t[i][j]];
                for (l, w) in hops.windows(2).enumerate() {
                    if l < 3 {
                        layers[w[1]] = l + 1;
                    }
                    edges.push((w[0], w[1], b));
                }
            }
        }
    }
    let graph = BandwidthGraph::new(total, edges, 0)?;
    debug_assert_eq!(graph.layers()?, layers);
    Ok(SetSplitReduction {
        instance: ri.clone(),
        graph,
        layers,
        v,
        f,
        parts: [pt[0], pt[1]],
        part_relays: [pr[0], pr[1]],
        u,
        t,
        t_paths,
    })
}

/// Round-by-round sends on a layered bandwidth graph: `rounds[r]` lists
/// `(u, v, messages)` moved from layer `r` to layer `r + 1` in round `r + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LayeredSchedule {
    pub message_count: usize,
    pub rounds: Vec<Vec<(usize, usize, u64)>>,
}

/// Replays a schedule with bandwidth, layering and knowledge checks; returns
/// what every node knows at the end.
pub fn simulate_layered_schedule(
    bg: &BandwidthGraph,
    layers: &[usize],
    schedule: &LayeredSchedule,
) -> Result<Vec<u64>> {
    let mut known = vec![0u64; bg.node_count];
    known[bg.source] = full_mask(schedule.message_count);
    for (r, sends) in schedule.rounds.iter().enumerate() {
        let start = known.clone();
        for &(a, b, msgs) in sends {
            let width = bg.bandwidth(a, b).ok_or_else(|| {
                Error::invalid(format!("round {}: ({a}, {b}) is not an edge", r + 1))
            })?;
            if layers[a] != r || layers[b] != r + 1 {
                return Err(Error::invalid(format!(
                    "round {}: ({a}, {b}) does not leave layer {r}",
                    r + 1
                )));
            }
            if msgs.count_ones() as u64 > width {
                return Err(Error::invalid(format!(
                    "round {}: ({a}, {b}) over bandwidth",
                    r + 1
                )));
            }
            if msgs & !start[a] != 0 {
                return Err(Error::invalid(format!(
                    "round {}: {a} sends messages it does not hold",
                    r + 1
                )));
            }
            known[b] |= msgs;
        }
    }
    Ok(known)
}

fn lowest(mask: u64, count: u64) -> u64 {
    let mut out = 0;
    let mut rest = mask;
    for _ in 0..count {
        if rest == 0 {
            break;
        }
        let bit = rest & rest.wrapping_neg();
        out |= bit;
        rest ^= bit;
    }
    out
}

/// The forwarding schedule for the split `s1`: round one hands `m_i` to
/// `v_i`, each part to its relay and to every `t_{i,j}` path the messages
/// outside `F_i ∪ S_j`; afterwards every node forwards all it knows.
pub fn split_schedule(red: &SetSplitReduction, s1: u64) -> LayeredSchedule {
    let ri = &red.instance;
    let full = ri.full();
    let part = [s1, full & !s1];
    let fam = ri.masks();
    let bg = &red.graph;
    let mut first = Vec::new();
    for (i, &vi) in red.v.iter().enumerate() {
        first.push((0, vi, 1u64 << i));
    }
    for j in 0..2 {
        first.push((0, red.part_relays[j], part[j]));
    }
    for i in 0..fam.len() {
        for j in 0..2 {
            if let Some(&hop) = red.t_paths[i][j].first() {
                let width = bg.bandwidth(0, hop).unwrap();
                first.push((0, hop, lowest(full & !(fam[i] | part[j]), width)));
            }
        }
    }
    let mut rounds = vec![first];
    let mut known = vec![0u64; bg.node_count];
    known[0] = full;
    for r in 1..=red.depth() {
        for &(_, b, msgs) in &rounds[r - 1] {
            known[b] |= msgs;
        }
        if r == red.depth() {
            break;
        }
        let mut sends: Vec<(usize, usize, u64)> = bg
            .edges
            .iter()
            .flat_map(|&(a, b, w)| [(a, b, w), (b, a, w)])
            .filter(|&(a, b, _)| red.layers[a] == r && red.layers[b] == r + 1)
            .map(|(a, b, w)| (a, b, lowest(known[a], w)))
            .collect();
        sends.sort_unstable();
        rounds.push(sends);
    }
    LayeredSchedule {
        message_count: ri.ground_set_size,
        rounds,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitDecision {
    pub saturable: bool,
    /// Elements sent to `S_1` by the first saturating split.
    pub witness: Option<Vec<usize>>,
    pub splits_tried: usize,
}

/// Tries every `(n1, n2)` split with the forwarding schedule and reports
/// whether one saturates all `t_{i,j}` by round four.
pub fn decide_saturation_round4(red: &SetSplitReduction) -> Result<SplitDecision> {
    let ri = &red.instance;
    if ri.ground_set_size > DECIDE_MAX {
        return Err(Error::BudgetExceeded(format!(
            "split search handles |S| <= {DECIDE_MAX}"
        )));
    }
    let full = ri.full();
    let mut tried = 0;
    for s1 in masks_of_size(ri.ground_set_size, ri.n1) {
        tried += 1;
        let schedule = split_schedule(red, s1);
        let known = simulate_layered_schedule(&red.graph, &red.layers, &schedule)?;
        if red.targets().all(|t| known[t] == full) {
            return Ok(SplitDecision {
                saturable: true,
                witness: Some(
                    (0..ri.ground_set_size)
                        .filter(|x| s1 >> x & 1 == 1)
                        .collect(),
                ),
                splits_tried: tried,
            });
        }
    }
    Ok(SplitDecision {
        saturable: false,
        witness: None,
        splits_tried: tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_element_instance_shape() {
        let ri = ReductionInstance::new(2, vec![vec![0, 1]], 1).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        assert_eq!(
            (red.v.len(), red.f.len(), red.u.len() * 2, red.t.len() * 2),
            (2, 1, 2, 2)
        );
        assert!(red.t_paths[0].iter().all(Vec::is_empty));
        assert_eq!(red.graph.bandwidth(0, red.t[0][0]), None);
        assert_eq!(red.depth(), 4);
        assert!(decide_saturation_round4(&red).unwrap().saturable);
        assert!(brute_force_set_splitting(&ri).unwrap());
    }

    #[test]
    fn empty_family_is_trivially_splittable() {
        let ri = ReductionInstance::new(3, vec![], 1).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        assert_eq!(red.targets().count(), 0);
        assert!(decide_saturation_round4(&red).unwrap().saturable);
        assert!(brute_force_set_splitting(&ri).unwrap());
    }

    #[test]
    fn chain_family_agrees_with_brute_force() {
        let ri = ReductionInstance::new(3, vec![vec![0, 1], vec![1, 2]], 1).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        let d = decide_saturation_round4(&red).unwrap();
        assert_eq!(d.saturable, brute_force_set_splitting(&ri).unwrap());
        assert_eq!(d.witness, Some(vec![1]));
    }

    #[test]
    fn singletons_never_split() {
        let ri = ReductionInstance::new(2, vec![vec![0]], 1).unwrap();
        assert!(!brute_force_set_splitting(&ri).unwrap());
        let red = build_setsplit_reduction(&ri).unwrap();
        assert!(!decide_saturation_round4(&red).unwrap().saturable);
    }

    #[test]
    fn reduction_bandwidths() {
        let ri = ReductionInstance::new(4, vec![vec![0, 2, 3]], 1).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        let g = &red.graph;
        assert_eq!(g.bandwidth(red.f[0], red.u[0][0]), Some(3));
        assert_eq!(g.bandwidth(red.parts[1], red.u[0][1]), Some(3));
        assert_eq!(g.bandwidth(red.u[0][1], red.t[0][1]), Some(4));
        assert_eq!(g.bandwidth(0, red.t_paths[0][0][0]), Some(2));
        assert!(red.t_paths[0][1].is_empty());
    }

    #[test]
    fn random_instances_agree() {
        for seed in 0..60 {
            let ri = random_instance(2 + seed as usize % 5, 1 + seed as usize % 4, RngSeed(seed))
                .unwrap();
            let red = build_setsplit_reduction(&ri).unwrap();
            assert_eq!(
                decide_saturation_round4(&red).unwrap().saturable,
                brute_force_set_splitting(&ri).unwrap(),
                "{ri:?}"
            );
        }
    }

    #[test]
    fn overdrawn_schedule_is_rejected() {
        let ri = ReductionInstance::new(2, vec![vec![0, 1]], 1).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        let mut s = split_schedule(&red, 0b01);
        s.rounds[0][0].2 = 0b11;
        assert!(simulate_layered_schedule(&red.graph, &red.layers, &s).is_err());
    }
}
