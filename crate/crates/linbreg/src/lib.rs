//! Linearised Bregman iteration for smooth non-convex objectives on 2D grids.
//!
//! The iteration alternates a dual gradient step with an exact convex
//! subproblem solve:
//!
//! ```text
//! p_{k+1} = p_k - tau_k * grad E(u_k)
//! u_{k+1} = argmin_u { J(u) - <p_{k+1}, u> }
//! ```
//!
//! where `E` is a smooth (possibly non-convex) objective and `J` a convex
//! potential. With `J = 1/2 ||u||^2` this is plain gradient descent; richer
//! potentials (Sobolev smoothing, sparsity in a cosine basis) regularise the
//! iterates while the descent theory — sufficient decrease, summability of
//! symmetric Bregman distances, dual gradient bounds — remains checkable at
//! runtime. The `solver` module records all of these per iteration.
//!
//! The crate ships a complete phase-unwrapping testbed: recover a smooth
//! surface `u` from noisy observations of `(cos u, sin u)`. See the
//! `experiment` module and the runnable examples.

pub mod error;
pub mod experiment;
pub mod grid;
pub mod objective;
pub mod potential;
pub mod solver;
pub mod transforms;

pub use error::{Error, Result};
pub use experiment::{
    compare, discrepancy_threshold, generate_to_dir, make_dataset, peaks, peaks_value,
    run_experiment, run_experiment_to_dir, ExperimentConfig, ExperimentOutcome, GaussianSampler,
    NoiseModel, PotentialKind, SplitMix64,
};
pub use grid::{axpy, Grid, GridPair};
pub use objective::{Objective, PhaseUnwrapObjective, QuadraticObjective};
pub use potential::{
    bregman, bregman_diag, symmetric_bregman, BregmanDiag, DctL1Potential, Potential,
    QuadraticPotential, SobolevPotential, SUBGRADIENT_TOL,
};
pub use solver::{
    bregman_step, check_rho_condition, default_rho, diagnostics_report, run, DiagnosticsReport,
    IterationTrace, SolverResult, StepMode, StepPolicy, StopReason, StoppingRule, TraceRow,
};
pub use transforms::{divergence, gradient, DctPlan, NeumannLaplacian};
