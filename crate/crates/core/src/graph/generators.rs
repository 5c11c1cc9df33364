use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// Samples G(n, p): every one of the n(n-1)/2 pairs is drawn independently,
/// in lexicographic pair order, from the seeded stream.
pub fn erdos_renyi(n: usize, p: f64, seed: RngSeed) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("G(n, p) needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

pub fn path(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::invalid("cycle needs at least 3 nodes"));
    }
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
}

pub fn complete(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Result<Graph> {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
}

/// Circulant graph: `v` is joined to `v ± s mod n` for every shift `s`.
pub fn circulant(n: usize, shifts: &[usize]) -> Result<Graph> {
    if n < 3 {
        return Err(Error::invalid("circulant needs at least 3 nodes"));
    }
    if shifts.iter().any(|&s| s == 0 || 2 * s >= n) {
        return Err(Error::invalid("circulant shifts must lie in 1..n/2"));
    }
    let mut distinct = shifts.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Graph::from_edges(
        n,
        (0..n).flat_map(|v| distinct.iter().map(move |&s| (v, (v + s) % n))),
    )
}

/// Two copies of K_k joined by the single edge (k-1, k).
pub fn barbell(k: usize) -> Result<Graph> {
    if k < 2 {
        return Err(Error::invalid("barbell cliques need at least 2 nodes"));
    }
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.push((k - 1, k));
    Graph::from_edges(2 * k, edges)
}

/// `cliques` copies of K_size. Member j of clique i is node `i * size + j`.
///
/// Without chords, member j is matched to member j of the next clique around
/// the ring (the product of a cycle with K_size). With chords, member j is
/// instead matched to member j of clique `i + s_j`, where the shift `s_j`
/// cycles through `1..cliques/2`, which makes the clique-level graph a dense
/// circulant and the whole graph a good expander.
pub fn ring_of_cliques(cliques: usize, size: usize, chords: bool) -> Result<Graph> {
    if cliques < 3 || size < 2 {
        return Err(Error::invalid(
            "ring of cliques needs >= 3 cliques of size >= 2",
        ));
    }
    if chords && cliques < 4 {
        return Err(Error::invalid("chorded ring of cliques needs >= 4 cliques"));
    }
    let node = |i: usize, j: usize| (i % cliques) * size + j;
    let mut edges = Vec::new();
    for i in 0..cliques {
        for u in 0..size {
            for v in u + 1..size {
                edges.push((node(i, u), node(i, v)));
            }
        }
        for j in 0..size {
            let shift = if chords {
                // Shifts avoid cliques/2 so each chord pair stays distinct.
                1 + j % ((cliques - 1) / 2)
            } else {
                1
            };
            edges.push((node(i, j), node(i + shift, j)));
        }
    }
    Graph::from_edges(cliques * size, edges)
}

/// Uniform random recursive tree: node v > 0 attaches to a uniform earlier node.
pub fn random_tree(n: usize, seed: RngSeed) -> Result<Graph> {
    let mut rng = seed.rng();
    let edges: Vec<_> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_cases() {
        let g = erdos_renyi(2, 1.0, RngSeed(99)).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1)]);
        let g = erdos_renyi(5, 0.0, RngSeed(99)).unwrap();
        let s = g.degree_stats();
        assert_eq!((s.min, s.max, g.edge_count()), (0, 0, 0));
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(erdos_renyi(10, -0.1, RngSeed(0)).is_err());
        assert!(erdos_renyi(10, 1.5, RngSeed(0)).is_err());
        assert!(erdos_renyi(10, f64::NAN, RngSeed(0)).is_err());
        assert!(erdos_renyi(1, 0.5, RngSeed(0)).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let a = erdos_renyi(120, 0.2, RngSeed(5)).unwrap();
        let b = erdos_renyi(120, 0.2, RngSeed(5)).unwrap();
        let c = erdos_renyi(120, 0.2, RngSeed(6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn edge_count_mean_within_three_sigma() {
        // |E| ~ Binomial(N, p) with N = n(n-1)/2, so the mean of 200 samples
        // has standard deviation sqrt(N p (1-p) / 200).
        let (n, p, seeds) = (1000usize, 0.05f64, 200u64);
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        assert_eq!(mean, 24975.0);
        let sd_of_mean = (pairs * p * (1.0 - p) / seeds as f64).sqrt();
        let sample: f64 = (0..seeds)
            .map(|s| erdos_renyi(n, p, RngSeed(s)).unwrap().edge_count() as f64)
            .sum::<f64>()
            / seeds as f64;
        assert!(
            (sample - mean).abs() <= 3.0 * sd_of_mean,
            "sample mean {sample} vs {mean} (sd {sd_of_mean})"
        );
    }

    #[test]
    fn handshake_identity() {
        for seed in 0..5 {
            let g = erdos_renyi(150, 0.07, RngSeed(seed)).unwrap();
            let total: usize = (0..150).map(|v| g.degree(v)).sum();
            assert_eq!(total, 2 * g.edge_count());
        }
    }

    #[test]
    fn barbell_shape() {
        let g = barbell(4).unwrap();
        assert_eq!(g.edge_count(), 13);
        assert!(g.is_connected());
    }

    #[test]
    fn ring_of_cliques_degrees() {
        let plain = ring_of_cliques(8, 6, false).unwrap();
        let chorded = ring_of_cliques(16, 32, true).unwrap();
        for g in [&plain, &chorded] {
            let s = g.degree_stats();
            assert!(g.is_simple());
            assert_eq!(s.min, s.max);
        }
        assert_eq!(plain.degree_stats().min, 5 + 2);
        assert_eq!(chorded.degree_stats().min, 31 + 2);
        assert_eq!(chorded.node_count(), 512);
    }

    #[test]
    fn circulant_is_regular() {
        let g = circulant(20, &[1, 3, 7]).unwrap();
        assert!(g.is_simple());
        assert_eq!(g.slot_range(), (6, 6));
        assert!(circulant(10, &[5]).is_err());
    }

    #[test]
    fn random_tree_is_tree() {
        let g = random_tree(300, RngSeed(4)).unwrap();
        assert_eq!(g.edge_count(), 299);
        assert!(g.is_connected());
    }
}
