//! Phase unwrapping with the sparsity potential J = ½‖u‖² + α‖Cu‖₁,
//! where C is the orthonormal 2-D cosine transform and the ℓ¹ norm is
//! Huber-smoothed with radius μ.
//!
//! The subproblem is a per-coefficient shrinkage in the cosine basis, so the
//! iterates are built from few low-frequency atoms at first and gain detail
//! as the dual variable grows. The example also reports how sparse the final
//! reconstruction is in the transform domain.
//!
//! Run with: cargo run --release -p linbreg --example phase_unwrap_dct_l1

use linbreg::{run_experiment, DctPlan, ExperimentConfig, PotentialKind};

fn main() -> linbreg::Result<()> {
    let cfg = ExperimentConfig {
        potential: PotentialKind::DctL1,
        alpha: Some(50.0),
        mu: 0.01,
        ..ExperimentConfig::default()
    };
    let outcome = run_experiment(&cfg)?;

    let rel = outcome.result.u_final.sub(&outcome.truth)?.norm() / outcome.truth.norm();

    println!(
        "dct_l1 (alpha = 50, mu = 0.01): stopped after {} iterations ({})",
        outcome.result.iterations, outcome.result.stop_reason
    );
    println!(
        "    E(u_final) = {:.4}  (discrepancy threshold {:.4})",
        outcome.result.final_e, outcome.threshold
    );
    println!("    relative error vs. truth = {rel:.4}");

    // Sparsity of the reconstruction in the cosine basis: count coefficients
    // that carry a meaningful share of the energy.
    let plan = DctPlan::new(cfg.rows, cfg.cols);
    let coeffs = plan.dct2(&outcome.result.u_final)?;
    let peak = coeffs.values().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let active = coeffs
        .values()
        .iter()
        .filter(|c| c.abs() > 1e-3 * peak)
        .count();
    println!(
        "    active cosine coefficients (> 1e-3 of peak): {active} of {}",
        coeffs.len()
    );
    println!();
    println!("{}", outcome.report);
    Ok(())
}
