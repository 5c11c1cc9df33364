//! From COBRA subgraphs to a verified spanning tree packing.

use mcbsim::cobra::{run_multi_cobra, CobraConfig};
use mcbsim::graph::erdos_renyi;
use mcbsim::packing::{build_tree_packing, verify_packing};
use mcbsim::RngSeed;

fn main() -> mcbsim::Result<()> {
    let g = erdos_renyi(250, 0.12, RngSeed(5))?;
    let r = g.regularize()?;
    let a = run_multi_cobra(&r, 0, &CobraConfig::new(g.degree_stats().min), RngSeed(5))?;
    let tp = build_tree_packing(&r, &a, 0)?;
    println!(
        "S = {}, H = {}, W = {}, max depth {}, built in {} rounds ({} per hop)",
        tp.size, tp.diameter, tp.weight, tp.max_depth, tp.build_rounds, tp.phase_len
    );

    let report = verify_packing(&tp, &g);
    for c in &report.checks {
        println!("  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name);
    }
    assert!(report.passed());
    Ok(())
}
