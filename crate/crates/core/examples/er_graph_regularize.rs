//! Sample G(n, p), pad every node with self-loops up to Δ, and check the
//! regularized graph is Δ-regular with the same neighbor lists.
//!
//! ```bash
//! cargo run --example er_graph_regularize -- 300 7
//! ```

use mcbsim::graph::erdos_renyi;
use mcbsim::RngSeed;

fn main() -> mcbsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(300, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(7, |a| a.parse().expect("seed"));
    let p = 20.0 * (n as f64).ln() / n as f64;

    let g = erdos_renyi(n, p.min(1.0), RngSeed(seed))?;
    let stats = g.degree_stats();
    println!(
        "G({n}, {p:.4}): m = {}, δ = {}, Δ = {}, connected = {}",
        g.edge_count(),
        stats.min,
        stats.max,
        g.is_connected()
    );

    let r = g.regularize()?;
    let (lo, hi) = r.slot_range();
    let loops: usize = (0..n).map(|v| r.self_loops(v)).sum();
    println!("regularized: every node has {lo}..={hi} slots, {loops} self-loops added");
    assert_eq!(lo, hi);
    assert_eq!(r.edge_count(), g.edge_count());
    Ok(())
}
