//! The synthetic dataset: a smooth multi-peak surface observed through its
//! wrapped phase (cos u, sin u) plus Gaussian noise.
//!
//! The truth surface spans several multiples of 2π, so the observations
//! determine it only up to a per-pixel branch choice — that ambiguity is
//! what makes the reconstruction problem non-convex. Noise is drawn from a
//! seeded deterministic stream (SplitMix64 + Box–Muller), so the same seed
//! always produces byte-identical artifacts; the expected data-fit energy of
//! the truth, E ≈ σ²·(number of scalar observations)/2, is the discrepancy
//! level the solver stops at.
//!
//! Run with: cargo run --release -p linbreg --example generate_dataset

use linbreg::{
    discrepancy_threshold, generate_to_dir, make_dataset, ExperimentConfig, Objective,
    PhaseUnwrapObjective,
};
use std::path::PathBuf;

fn main() -> linbreg::Result<()> {
    let cfg = ExperimentConfig::default();
    let (truth, data) = make_dataset(&cfg)?;

    println!(
        "truth surface: {}x{} grid, range [{:.3}, {:.3}] ({:.2} periods)",
        truth.rows(),
        truth.cols(),
        truth.min(),
        truth.max(),
        (truth.max() - truth.min()) / std::f64::consts::TAU
    );

    let threshold = discrepancy_threshold(cfg.sigma, cfg.rows, cfg.cols);
    let obj = PhaseUnwrapObjective::new(data);
    println!(
        "E(truth) = {:.4} vs. expected noise level sigma^2*m/2 = {:.4}",
        obj.value(&truth)?,
        threshold
    );

    // Same seed, same bytes: the artifacts are reproducible end to end.
    let base = PathBuf::from(
        std::env::var_os("CARGO_TARGET_DIR").unwrap_or_else(|| "target".into()),
    )
    .join("generate_dataset");
    let (dir_a, dir_b) = (base.join("a"), base.join("b"));
    std::fs::create_dir_all(&dir_a)?;
    std::fs::create_dir_all(&dir_b)?;
    generate_to_dir(&cfg, &dir_a)?;
    generate_to_dir(&cfg, &dir_b)?;
    for name in ["truth.csv", "f1.csv", "f2.csv"] {
        let a = std::fs::read(dir_a.join(name))?;
        let b = std::fs::read(dir_b.join(name))?;
        println!("{name}: {} bytes, reruns identical: {}", a.len(), a == b);
    }
    println!("artifacts left in {}", base.display());
    Ok(())
}
