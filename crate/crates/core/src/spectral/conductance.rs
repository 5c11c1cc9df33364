use crate::error::{Error, Result};
use crate::graph::Graph;

pub const CONDUCTANCE_MAX_NODES: usize = 22;

/// `min_S |∂S| / min(vol S, vol S^c)` over all nonempty proper subsets, with
/// volumes counted in slots. Subsets are visited in Gray-code order so each
/// step moves one node and updates the cut in `O(deg)`.
pub fn conductance_exact(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n > CONDUCTANCE_MAX_NODES {
        return Err(Error::BudgetExceeded(format!(
            "exact conductance enumerates 2^n subsets; n = {n} exceeds {CONDUCTANCE_MAX_NODES}"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("conductance needs at least 2 nodes"));
    }
    let total = g.volume() as i64;
    let mut inside = vec![false; n];
    let (mut cut, mut vol) = (0i64, 0i64);
    let mut best = f64::INFINITY;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let mut toward_inside = 0i64;
        for (w, m) in g.adjacency(v) {
            if inside[w] {
                toward_inside += m as i64;
            }
        }
        let degree = g.degree(v) as i64;
        if inside[v] {
            inside[v] = false;
            cut += 2 * toward_inside - degree;
            vol -= g.slot_count(v) as i64;
        } else {
            inside[v] = true;
            cut += degree - 2 * toward_inside;
            vol += g.slot_count(v) as i64;
        }
        let denom = vol.min(total - vol);
        if denom > 0 && vol < total {
            best = best.min(cut as f64 / denom as f64);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{barbell, complete, cycle, erdos_renyi};
    use crate::rng::RngSeed;

    fn brute_force(g: &Graph) -> f64 {
        let n = g.node_count();
        let total = g.volume();
        let mut best = f64::INFINITY;
        for mask in 1u64..(1u64 << n) - 1 {
            let vol: usize = (0..n)
                .filter(|v| mask >> v & 1 == 1)
                .map(|v| g.slot_count(v))
                .sum();
            let cut: usize = g
                .edges()
                .filter(|&(u, v, _)| (mask >> u & 1) != (mask >> v & 1))
                .map(|(_, _, m)| m as usize)
                .sum();
            let denom = vol.min(total - vol);
            if denom > 0 {
                best = best.min(cut as f64 / denom as f64);
            }
        }
        best
    }

    #[test]
    fn closed_forms() {
        assert_eq!(conductance_exact(&complete(2).unwrap()).unwrap(), 1.0);
        assert_eq!(conductance_exact(&cycle(4).unwrap()).unwrap(), 0.5);
        let b = conductance_exact(&barbell(4).unwrap()).unwrap();
        assert!((b - 1.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn matches_direct_enumeration() {
        for seed in 0..5 {
            let g = erdos_renyi(11, 0.35, RngSeed(seed)).unwrap();
            assert_eq!(conductance_exact(&g).unwrap(), brute_force(&g));
            let r = erdos_renyi(9, 0.5, RngSeed(seed)).unwrap();
            if r.degree_stats().min > 0 {
                let r = r.regularize().unwrap();
                assert_eq!(conductance_exact(&r).unwrap(), brute_force(&r));
            }
        }
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(
            conductance_exact(&cycle(23).unwrap()),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
