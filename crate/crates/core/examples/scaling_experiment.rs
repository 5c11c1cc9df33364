//! Small sweep over n and k/δ, then the fit of
//! `rounds ≈ a·log₂²n + b·log₂n·k/δ`.

use mcbsim::harness::{fit_scaling, run_experiment, scaling_points, ExperimentConfig};

fn main() -> mcbsim::Result<()> {
    let mut cfg = ExperimentConfig::new(vec![100, 200, 400], (1..=3).collect());
    cfg.k_per_delta = vec![1, 10, 50];
    let records = run_experiment(&cfg)?;
    for r in records.iter().filter(|r| r.is_ok()) {
        println!(
            "n = {:>4} seed {} k = {:>5}: total {:>5} rounds (broadcast {:>4}, baseline {:>6})",
            r.n,
            r.seed_used,
            r.k.unwrap(),
            r.total_rounds.unwrap(),
            r.broadcast_rounds.unwrap(),
            r.baseline_rounds.unwrap()
        );
    }
    let fit = fit_scaling(&scaling_points(&records))?;
    println!(
        "a = {:.3}, b = {:.3}, relative residual {:.3}",
        fit.a, fit.b, fit.relative_residual
    );
    Ok(())
}
