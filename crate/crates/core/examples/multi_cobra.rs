//! Multi-COBRA on a regularized random graph: coverage, edge weights and
//! subgraph diameters against their per-phase bounds.

use mcbsim::cobra::{
    coverage_report, edge_weight_histogram, run_multi_cobra, subgraph_diameter, CobraConfig,
};
use mcbsim::graph::erdos_renyi;
use mcbsim::RngSeed;

fn main() -> mcbsim::Result<()> {
    let n = 400;
    let g = erdos_renyi(n, 20.0 * (n as f64).ln() / n as f64, RngSeed(11))?;
    let delta = g.degree_stats().min;
    let a = run_multi_cobra(&g.regularize()?, 0, &CobraConfig::new(delta), RngSeed(11))?;

    let cover = coverage_report(&a);
    let slowest = cover.iter().filter_map(|c| c.cover_phase).max();
    println!(
        "{} walks, {} phases, {} covered (slowest after phase {:?})",
        a.num_walks(),
        a.phases_run(),
        cover.iter().filter(|c| c.covered).count(),
        slowest
    );
    println!(
        "max edge weight {} (bound {})",
        a.max_edge_weight(),
        4 * a.phases_run()
    );
    let diam = (0..a.num_walks())
        .map(|w| subgraph_diameter(&a, w))
        .collect::<mcbsim::Result<Vec<_>>>()?;
    println!(
        "max subgraph diameter {} (bound {})",
        diam.iter().max().unwrap(),
        2 * a.phases_run()
    );

    println!("edge weight histogram:");
    for (w, count) in edge_weight_histogram(&a) {
        println!("  {w:>3}: {count}");
    }
    Ok(())
}
