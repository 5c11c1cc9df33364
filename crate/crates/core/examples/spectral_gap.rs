//! λ₂ of a few graph families, the mixing-time bounds it implies, and the
//! measured mixing time of the lazy edge walk.

use mcbsim::graph::{complete, cycle, erdos_renyi, ring_of_cliques};
use mcbsim::spectral::{spectral_report, MixingOptions};
use mcbsim::{Graph, RngSeed};

fn main() -> mcbsim::Result<()> {
    let graphs: Vec<(&str, Graph)> = vec![
        ("K_16", complete(16)?),
        ("C_20", cycle(20)?),
        ("G(120, 0.2)", erdos_renyi(120, 0.2, RngSeed(3))?),
        ("ring of 8 K_6 with chords", ring_of_cliques(8, 6, true)?),
    ];
    // Cycles mix in about n² steps, past the default 10·n cap.
    let opts = MixingOptions {
        tolerance: None,
        t_max: Some(100_000),
    };
    println!(
        "{:<28} {:>8} {:>8} {:>10} {:>10} {:>8}",
        "graph", "λ₂", "gap", "τ lower", "τ upper", "τ meas"
    );
    for (name, g) in graphs {
        let r = spectral_report(&g, Some(&opts))?;
        println!(
            "{:<28} {:>8.4} {:>8.4} {:>10.2} {:>10.2} {:>8}",
            name,
            r.lambda2,
            r.spectral_gap,
            r.mixing_lower,
            r.mixing_upper,
            r.mixing_empirical.unwrap()
        );
        if let Some(phi) = r.conductance {
            println!("{:<28} conductance {phi:.4}", "");
        }
    }
    Ok(())
}
