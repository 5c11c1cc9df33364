//! Embed a virtual random graph into a ring of cliques and run the whole
//! broadcast pipeline on top of it.

use mcbsim::embedding::{
    embed_er_graph, end_to_end_expander_broadcast, virtual_round_cost, EndToEndOptions,
};
use mcbsim::graph::ring_of_cliques;
use mcbsim::spectral::{mixing_time_empirical, MixingOptions};
use mcbsim::RngSeed;

fn main() -> mcbsim::Result<()> {
    let h = ring_of_cliques(12, 10, true)?;
    let tau = mixing_time_empirical(&h, &MixingOptions::default())?.t;
    println!(
        "host: n = {}, δ = {}, τ_mix = {tau}",
        h.node_count(),
        h.degree_stats().min
    );

    let (e, ledger) = embed_er_graph(&h, tau, RngSeed(4))?;
    let out = e.out_degrees();
    println!(
        "{} groups of {}, {} inactive sub-nodes, out-degrees {}..={}, max retries {} (cap {})",
        e.space.group_count(),
        e.space.group_size,
        e.space.inactive_count(),
        out.iter().min().unwrap(),
        out.iter().max().unwrap(),
        e.max_retries(),
        e.retry_cap
    );
    println!(
        "embedding took {} host rounds; one virtual round costs {}",
        ledger.embed_rounds,
        virtual_round_cost(&h, &e)
    );

    let k = 3 * h.degree_stats().min;
    let (trace, report) =
        end_to_end_expander_broadcast(&h, 0, k, &EndToEndOptions::default(), RngSeed(4))?;
    println!(
        "{k} messages: saturated = {}, rounds:",
        trace.is_saturated()
    );
    println!("{}", serde_json::to_string_pretty(&report.ledger)?);
    Ok(())
}
