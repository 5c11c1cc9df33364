//! Broadcast k messages over a tree packing, compare with pipelining along
//! one BFS tree, and write the send trace.
//!
//! ```bash
//! cargo run --example packing_broadcast -- trace.csv
//! ```

use std::fs::File;

use mcbsim::broadcast::{broadcast_over_packing, naive_bfs_broadcast, MessageSet};
use mcbsim::cobra::{run_multi_cobra, CobraConfig};
use mcbsim::graph::{diameter, erdos_renyi};
use mcbsim::packing::build_tree_packing;
use mcbsim::RngSeed;

fn main() -> mcbsim::Result<()> {
    let out = std::env::args().nth(1);
    let g = erdos_renyi(300, 0.1, RngSeed(2))?;
    let delta = g.degree_stats().min;
    let r = g.regularize()?;
    let a = run_multi_cobra(&r, 0, &CobraConfig::new(delta), RngSeed(2))?;
    let tp = build_tree_packing(&r, &a, 0)?;
    let d = diameter(&g)?;

    println!("δ = {delta}, D = {d}, S = {}, W = {}", tp.size, tp.weight);
    println!(
        "{:>6} {:>10} {:>10} {:>12}",
        "k", "packing", "one tree", "max(D, k/δ)"
    );
    for k in [delta, 10 * delta, 50 * delta] {
        let msgs = MessageSet::new(k)?;
        let trace = broadcast_over_packing(&g, &tp, msgs, false)?;
        assert!(trace.is_saturated());
        let naive = naive_bfs_broadcast(&g, 0, msgs)?;
        println!(
            "{k:>6} {:>10} {naive:>10} {:>12}",
            trace.total_rounds,
            d.max(k.div_ceil(delta))
        );
    }

    if let Some(path) = out {
        let trace = broadcast_over_packing(&g, &tp, MessageSet::new(2 * delta)?, true)?;
        trace.write_csv(File::create(&path)?)?;
        println!("{} sends written to {path}", trace.send_count);
    }
    Ok(())
}
