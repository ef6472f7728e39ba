//! Phase unwrapping with the plain quadratic potential J = ½‖u‖².
//!
//! With this choice the linearised Bregman iteration collapses to explicit
//! gradient descent on the data term, so this run is the baseline every
//! other configuration is compared against: it locks onto the principal
//! branch of the wrapped data almost immediately and stops at the noise
//! level after a handful of iterations, leaving the surface wrapped.
//!
//! Run with: cargo run --release -p linbreg --example phase_unwrap_gd

use linbreg::{run_experiment, ExperimentConfig, PotentialKind};

fn main() -> linbreg::Result<()> {
    let cfg = ExperimentConfig {
        potential: PotentialKind::Gd,
        ..ExperimentConfig::default()
    };
    let outcome = run_experiment(&cfg)?;

    let rel = outcome
        .result
        .u_final
        .sub(&outcome.truth)?
        .norm()
        / outcome.truth.norm();

    println!(
        "gd: stopped after {} iterations ({})",
        outcome.result.iterations, outcome.result.stop_reason
    );
    println!(
        "    E(u_final) = {:.4}  (discrepancy threshold {:.4})",
        outcome.result.final_e, outcome.threshold
    );
    println!("    relative error vs. truth  = {rel:.4}");
    println!(
        "    reconstruction range [{:.2}, {:.2}] vs. truth range [{:.2}, {:.2}]",
        outcome.result.u_final.min(),
        outcome.result.u_final.max(),
        outcome.truth.min(),
        outcome.truth.max()
    );
    println!();
    println!("{}", outcome.report);
    Ok(())
}
