//! Diameter and min cut both stay small, but the exact time-expanded flow
//! shows v₁ needs about √k rounds.

use mcbsim::hardness::{
    bandwidth_to_congest, build_sqrtk_instance, check_certificate, time_expanded_saturation,
};

fn main() -> mcbsim::Result<()> {
    println!(
        "{:>4} {:>3} {:>8} {:>9} {:>7} {:>9}",
        "k", "D", "cut(v1)", "residual", "rounds", "|V(G')|"
    );
    for k in [4, 9, 16, 25, 36] {
        let inst = build_sqrtk_instance(k)?;
        let sat = time_expanded_saturation(&inst.graph, inst.v1, k)?;
        check_certificate(&inst.graph, &sat)?;
        let congest = bandwidth_to_congest(&inst.graph)?;
        println!(
            "{k:>4} {:>3} {:>8} {:>9} {:>7} {:>9}",
            inst.diameter,
            inst.min_cut_s_v1,
            inst.residual_cut,
            sat.min_rounds,
            congest.graph.node_count()
        );
    }
    Ok(())
}
