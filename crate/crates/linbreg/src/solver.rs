//! The linearised Bregman iteration loop with step-size policies, stopping
//! rules, and a per-iteration record of every quantity the descent theory
//! speaks about.
//!
//! One iteration is
//!
//! ```text
//! p_{k+1} = p_k - tau_k * grad E(u_k)
//! u_{k+1} = argmin_u { J(u) - <p_{k+1}, u> }
//! ```
//!
//! By the optimality condition of the subproblem, the dual product identity
//!
//! ```text
//! <grad E(u_k), u_{k+1} - u_k> = -(1/tau_k) * Dsymm(u_{k+1}, u_k)
//! ```
//!
//! holds at every step, where `Dsymm = <u_{k+1} - u_k, p_{k+1} - p_k>` is
//! the symmetric Bregman distance of `J`. The step condition
//!
//! ```text
//! rho * Dsymm <= (1/tau) * Dsymm - (L/2) * ||u_{k+1} - u_k||^2
//! ```
//!
//! turns that identity into the sufficient-decrease estimate
//! `E(u_{k+1}) + rho * Dsymm <= E(u_k)`, which telescopes into summability
//! of the step distances. Backtracking mode enforces the step condition
//! *and* the decrease estimate directly (the latter can fail for
//! non-convex objectives whose local curvature exceeds the declared
//! majorant constant `L`, e.g. under data noise); fixed mode replicates a
//! constant step size and only records violations.

use crate::error::{Error, Result};
use crate::grid::{axpy, Grid};
use crate::objective::Objective;
use crate::potential::{Potential, SUBGRADIENT_TOL};

/// Slack for the step condition check: absorbs roundoff, scales with the
/// distance being compared.
pub const STEP_CONDITION_SLACK: f64 = 1e-12;

/// Relative slack for the sufficient-decrease estimate.
pub const DECREASE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Fixed,
    Backtracking,
}

impl std::fmt::Display for StepMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepMode::Fixed => write!(f, "fixed"),
            StepMode::Backtracking => write!(f, "backtracking"),
        }
    }
}

impl std::str::FromStr for StepMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(StepMode::Fixed),
            "backtracking" => Ok(StepMode::Backtracking),
            other => Err(Error::parse(
                "step mode",
                format!("expected `fixed` or `backtracking`, got `{other}`"),
            )),
        }
    }
}

/// Step-size policy. `rho` is the decrease coefficient; when `None` it is
/// derived from `tau0` and the objective's majorant constant as
/// `max(1e-6, 1/tau0 - L/2)` — the largest value for which the step
/// condition provably holds given `Dsymm >= ||du||^2`.
#[derive(Debug, Clone)]
pub struct StepPolicy {
    pub mode: StepMode,
    pub tau0: f64,
    pub rho: Option<f64>,
    pub shrink_factor: f64,
    pub max_backtracks: usize,
}

impl StepPolicy {
    pub fn fixed(tau0: f64) -> Self {
        StepPolicy {
            mode: StepMode::Fixed,
            tau0,
            rho: None,
            shrink_factor: 0.5,
            max_backtracks: 40,
        }
    }

    pub fn backtracking(tau0: f64) -> Self {
        StepPolicy {
            mode: StepMode::Backtracking,
            ..StepPolicy::fixed(tau0)
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(Error::param("tau0", format!("must be > 0, got {}", self.tau0)));
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::param("rho", format!("must be > 0, got {rho}")));
            }
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::param(
                "shrink_factor",
                format!("must lie in (0, 1), got {}", self.shrink_factor),
            ));
        }
        if self.max_backtracks == 0 {
            return Err(Error::param("max_backtracks", "must be >= 1"));
        }
        Ok(())
    }
}

pub fn default_rho(tau0: f64, surrogate_l: f64) -> f64 {
    (1.0 / tau0 - surrogate_l / 2.0).max(1e-6)
}

/// Stopping rules; the solver halts when any active rule fires. The
/// iteration cap is always active.
#[derive(Debug, Clone)]
pub struct StoppingRule {
    pub max_iters: usize,
    /// Halt once `E(u_k)` falls to the expected noise level.
    pub discrepancy_threshold: Option<f64>,
    /// Halt once `||grad E(u_k)||` falls below this.
    pub gradient_tol: Option<f64>,
    /// Halt once the per-step symmetric Bregman distance falls below this.
    pub dsymm_tol: Option<f64>,
}

impl StoppingRule {
    pub fn max_iters(max_iters: usize) -> Self {
        StoppingRule {
            max_iters,
            discrepancy_threshold: None,
            gradient_tol: None,
            dsymm_tol: None,
        }
    }

    pub fn with_discrepancy(mut self, threshold: f64) -> Self {
        self.discrepancy_threshold = Some(threshold);
        self
    }

    pub fn with_gradient_tol(mut self, tol: f64) -> Self {
        self.gradient_tol = Some(tol);
        self
    }

    pub fn with_dsymm_tol(mut self, tol: f64) -> Self {
        self.dsymm_tol = Some(tol);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be >= 1"));
        }
        for (name, v) in [
            ("discrepancy_threshold", self.discrepancy_threshold),
            ("gradient_tol", self.gradient_tol),
            ("dsymm_tol", self.dsymm_tol),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::param(name, format!("must be >= 0, got {v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `E(u_k)` reached the discrepancy threshold.
    Discrepancy,
    /// `||grad E(u_k)||` reached the gradient tolerance.
    GradientNorm,
    /// The per-step symmetric Bregman distance reached its tolerance.
    DsymmTol,
    /// The iteration cap was reached.
    MaxIters,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StopReason::Discrepancy => write!(f, "discrepancy"),
            StopReason::GradientNorm => write!(f, "gradient_norm"),
            StopReason::DsymmTol => write!(f, "dsymm"),
            StopReason::MaxIters => write!(f, "max_iters"),
        }
    }
}

/// Everything recorded about one accepted step `k -> k+1`.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub iter: usize,
    /// `E(u_k)` before the step
    pub e: f64,
    /// symmetric Bregman distance `<u_{k+1} - u_k, p_{k+1} - p_k>`
    pub dsymm: f64,
    /// `||grad E(u_k)||`
    pub grad_norm: f64,
    /// accepted step size
    pub tau: f64,
    /// `max(0, E(u_{k+1}) + rho * dsymm - E(u_k))`
    pub descent_violation: f64,
    /// `E(u_{k+1})` (not exported to CSV; next row repeats it as `e`)
    pub e_next: f64,
    /// `<grad E(u_k), u_{k+1} - u_k>`
    pub grad_dot_du: f64,
    /// `||u_{k+1} - u_k||^2`
    pub du_norm_sq: f64,
    /// whether the step condition held at the accepted tau
    pub step_condition_held: bool,
}

/// Complete per-iteration record of a run, with the decrease coefficient
/// the rows were judged against.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
    pub rho: f64,
}

impl IterationTrace {
    /// CSV export: `iter,E,dsymm,grad_norm,tau,descent_violation`, one row
    /// per iteration, 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("iter,E,dsymm,grad_norm,tau,descent_violation\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.iter, r.e, r.dsymm, r.grad_norm, r.tau, r.descent_violation
            );
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub u_final: Grid,
    pub p_final: Grid,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub trace: IterationTrace,
    /// Smallest accepted step size; `tau0` when no step was taken.
    pub tau_inf: f64,
    /// `E(u_final)`
    pub final_e: f64,
}

fn require_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn step_unchecked(
    obj: &dyn Objective,
    potential: &dyn Potential,
    gradient: &Grid,
    p: &Grid,
    tau: f64,
) -> Result<(Grid, Grid)> {
    let _ = obj;
    let p_next = axpy(-tau, gradient, p)?;
    let u_next = potential.solve_subproblem(&p_next)?;
    Ok((u_next, p_next))
}

/// One linearised Bregman step: dual gradient update, then the exact
/// subproblem solve. Validates that `(u, p)` is subdifferential-consistent
/// before stepping; the output pair is consistent by construction of
/// `solve_subproblem`.
pub fn bregman_step(
    obj: &dyn Objective,
    potential: &dyn Potential,
    u: &Grid,
    p: &Grid,
    tau: f64,
) -> Result<(Grid, Grid)> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", format!("must be > 0, got {tau}")));
    }
    let residual = potential.subgradient_consistency(u, p)?;
    if residual > SUBGRADIENT_TOL {
        return Err(Error::SubgradientInconsistent {
            context: "bregman_step input pair (u, p)".to_string(),
            residual,
            tol: SUBGRADIENT_TOL,
        });
    }
    let g = obj.gradient(u)?;
    step_unchecked(obj, potential, &g, p, tau)
}

fn rho_condition_scalar(ds: f64, du_norm_sq: f64, tau: f64, rho: f64, surrogate_l: f64) -> bool {
    rho * ds <= ds / tau - 0.5 * surrogate_l * du_norm_sq + STEP_CONDITION_SLACK * (1.0 + ds)
}

/// Whether the step condition holds for the step `u -> u_next` with duals
/// `p -> p_next`:
/// `rho * Dsymm <= (1/tau) * Dsymm - (L/2) * ||u_next - u||^2` up to a
/// roundoff slack, where `Dsymm = <u_next - u, p_next - p>`.
#[allow(clippy::too_many_arguments)]
pub fn check_rho_condition(
    potential: &dyn Potential,
    obj: &dyn Objective,
    u: &Grid,
    u_next: &Grid,
    p: &Grid,
    p_next: &Grid,
    tau: f64,
    rho: f64,
) -> Result<bool> {
    let _ = potential;
    let du = u_next.sub(u)?;
    let ds = du.inner(&p_next.sub(p)?)?;
    Ok(rho_condition_scalar(
        ds,
        du.norm_sq(),
        tau,
        rho,
        obj.surrogate_l(),
    ))
}

/// Runs the iteration from `u0` (the initial dual is the canonical
/// subgradient of the potential at `u0`) until a stopping rule fires.
///
/// Stopping is evaluated before each step, so an initial point already
/// below the discrepancy threshold returns after zero iterations. The
/// per-step symmetric Bregman distance rule is evaluated after each step.
///
/// In backtracking mode every accepted step satisfies both the step
/// condition and the sufficient-decrease estimate; exhausting
/// `max_backtracks` is an error. In fixed mode `tau0` is used
/// unconditionally and violations are recorded in the trace.
pub fn run(
    obj: &dyn Objective,
    potential: &dyn Potential,
    u0: &Grid,
    policy: &StepPolicy,
    stop: &StoppingRule,
) -> Result<SolverResult> {
    policy.validate()?;
    stop.validate()?;
    let surrogate_l = obj.surrogate_l();
    let rho = match policy.rho {
        Some(r) => r,
        None => default_rho(policy.tau0, surrogate_l),
    };

    let mut u = u0.clone();
    let mut p = potential.initial_subgradient(&u)?;
    let mut e = require_finite(obj.value(&u)?, "objective value at u0")?;
    let mut rows: Vec<TraceRow> = Vec::new();
    let mut tau_inf = policy.tau0;

    let stop_reason = loop {
        let g = obj.gradient(&u)?;
        let grad_norm = require_finite(g.norm(), "gradient norm")?;

        if let Some(threshold) = stop.discrepancy_threshold {
            if e <= threshold {
                break StopReason::Discrepancy;
            }
        }
        if let Some(tol) = stop.gradient_tol {
            if grad_norm <= tol {
                break StopReason::GradientNorm;
            }
        }
        let k = rows.len();
        if k >= stop.max_iters {
            break StopReason::MaxIters;
        }

        let mut tau = policy.tau0;
        let mut attempts = 0usize;
        let (u_next, p_next, ds, du_sq, e_next, grad_dot_du, held) = loop {
            let (u_next, p_next) = step_unchecked(obj, potential, &g, &p, tau)?;
            let du = u_next.sub(&u)?;
            let ds = du.inner(&p_next.sub(&p)?)?;
            let du_sq = du.norm_sq();
            let e_next = require_finite(obj.value(&u_next)?, "objective value")?;
            let held = rho_condition_scalar(ds, du_sq, tau, rho, surrogate_l);
            let decreased = e_next + rho * ds <= e + DECREASE_SLACK * (1.0 + e.abs());
            if policy.mode == StepMode::Fixed || (held && decreased) {
                let grad_dot_du = g.inner(&du)?;
                break (u_next, p_next, ds, du_sq, e_next, grad_dot_du, held);
            }
            attempts += 1;
            if attempts > policy.max_backtracks {
                return Err(Error::BacktrackingFailed { iter: k, attempts });
            }
            tau *= policy.shrink_factor;
        };

        rows.push(TraceRow {
            iter: k,
            e,
            dsymm: ds,
            grad_norm,
            tau,
            descent_violation: (e_next + rho * ds - e).max(0.0),
            e_next,
            grad_dot_du,
            du_norm_sq: du_sq,
            step_condition_held: held,
        });
        tau_inf = tau_inf.min(tau);
        u = u_next;
        p = p_next;
        e = e_next;

        if let Some(tol) = stop.dsymm_tol {
            if ds <= tol {
                break StopReason::DsymmTol;
            }
        }
    };

    let residual = potential.subgradient_consistency(&u, &p)?;
    if residual > SUBGRADIENT_TOL {
        return Err(Error::SubgradientInconsistent {
            context: "final iterate pair".to_string(),
            residual,
            tol: SUBGRADIENT_TOL,
        });
    }

    Ok(SolverResult {
        iterations: rows.len(),
        stop_reason,
        trace: IterationTrace { rows, rho },
        u_final: u,
        p_final: p,
        tau_inf,
        final_e: e,
    })
}

/// Violation counts and worst slack for one runtime-checked estimate.
/// `worst_slack` is the largest amount by which the estimate's left side
/// exceeded its right side (negative means it always held with margin).
#[derive(Debug, Clone, Copy)]
pub struct ConditionSummary {
    pub checked: usize,
    pub violations: usize,
    pub worst_slack: f64,
}

impl ConditionSummary {
    fn from_slacks(slacks: impl Iterator<Item = (f64, bool)>) -> ConditionSummary {
        let mut summary = ConditionSummary {
            checked: 0,
            violations: 0,
            worst_slack: f64::NEG_INFINITY,
        };
        for (slack, violated) in slacks {
            summary.checked += 1;
            if violated {
                summary.violations += 1;
            }
            summary.worst_slack = summary.worst_slack.max(slack);
        }
        if summary.checked == 0 {
            summary.worst_slack = 0.0;
        }
        summary
    }
}

/// Runtime verification of the descent theory along a completed run.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub potential: &'static str,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub rho: f64,
    pub tau_inf: f64,
    pub final_e: f64,
    /// `E(u_{k+1}) + rho*Dsymm <= E(u_k)` per step
    pub sufficient_decrease: ConditionSummary,
    /// `rho*Dsymm <= Dsymm/tau - (L/2)||du||^2` per step
    pub step_condition: ConditionSummary,
    /// `gamma*rho*||du||^2 <= E(u_k) - E(u_{k+1})` per step (needs gamma)
    pub squared_step_bound: Option<ConditionSummary>,
    /// `||grad E(u_k)|| <= (1/(delta*tau_inf))*||du||` per step (needs delta)
    pub gradient_bound: Option<ConditionSummary>,
    /// `rho * sum(Dsymm) <= E(u_0) - min_k E(u_k)` up to 1e-6
    pub dsymm_sum: f64,
    pub telescoping_bound: f64,
    pub telescoping_ok: bool,
    pub max_dsymm: f64,
    pub final_dsymm: f64,
    /// means over the last (up to) 10 iterations, proxies for the
    /// vanishing-step limit
    pub tail_mean_dsymm: f64,
    pub tail_mean_du: f64,
}

pub fn diagnostics_report(
    result: &SolverResult,
    potential: &dyn Potential,
    surrogate_l: f64,
) -> DiagnosticsReport {
    let rows = &result.trace.rows;
    let rho = result.trace.rho;

    let sufficient_decrease = ConditionSummary::from_slacks(rows.iter().map(|r| {
        let slack = r.e_next + rho * r.dsymm - r.e;
        (slack, slack > DECREASE_SLACK * (1.0 + r.e.abs()))
    }));
    let step_condition = ConditionSummary::from_slacks(rows.iter().map(|r| {
        let slack = rho * r.dsymm - (r.dsymm / r.tau - 0.5 * surrogate_l * r.du_norm_sq);
        (slack, !r.step_condition_held)
    }));
    let squared_step_bound = potential.gamma().map(|gamma| {
        ConditionSummary::from_slacks(rows.iter().map(|r| {
            let slack = gamma * rho * r.du_norm_sq - (r.e - r.e_next);
            (slack, slack > DECREASE_SLACK * (1.0 + r.e.abs()))
        }))
    });
    let gradient_bound = potential.delta().map(|delta| {
        let rho2 = 1.0 / (delta * result.tau_inf);
        ConditionSummary::from_slacks(rows.iter().map(|r| {
            let rhs = rho2 * r.du_norm_sq.sqrt();
            let slack = r.grad_norm - rhs;
            (slack, r.grad_norm > rhs * (1.0 + 1e-6))
        }))
    });

    let dsymm_sum: f64 = rows.iter().map(|r| r.dsymm).sum();
    let min_e = rows
        .iter()
        .map(|r| r.e)
        .chain(std::iter::once(result.final_e))
        .fold(f64::INFINITY, f64::min);
    let e0 = rows.first().map_or(result.final_e, |r| r.e);
    let telescoping_bound = e0 - min_e + 1e-6;
    let max_dsymm = rows.iter().map(|r| r.dsymm).fold(0.0f64, f64::max);
    let final_dsymm = rows.last().map_or(0.0, |r| r.dsymm);
    let tail = &rows[rows.len().saturating_sub(10)..];
    let tail_mean_dsymm = if tail.is_empty() {
        0.0
    } else {
        tail.iter().map(|r| r.dsymm).sum::<f64>() / tail.len() as f64
    };
    let tail_mean_du = if tail.is_empty() {
        0.0
    } else {
        tail.iter().map(|r| r.du_norm_sq.sqrt()).sum::<f64>() / tail.len() as f64
    };

    DiagnosticsReport {
        potential: potential.name(),
        iterations: result.iterations,
        stop_reason: result.stop_reason,
        rho,
        tau_inf: result.tau_inf,
        final_e: result.final_e,
        sufficient_decrease,
        step_condition,
        squared_step_bound,
        gradient_bound,
        dsymm_sum,
        telescoping_bound,
        telescoping_ok: rho * dsymm_sum <= telescoping_bound,
        max_dsymm,
        final_dsymm,
        tail_mean_dsymm,
        tail_mean_du,
    }
}

impl std::fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "potential: {}", self.potential)?;
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "stop_reason: {}", self.stop_reason)?;
        writeln!(f, "rho: {:.6e}", self.rho)?;
        writeln!(f, "tau_inf: {:.6e}", self.tau_inf)?;
        writeln!(f, "final_E: {:.10e}", self.final_e)?;
        let line = |f: &mut std::fmt::Formatter<'_>, name: &str, s: &ConditionSummary| {
            writeln!(
                f,
                "{name}: checked {} violations {} worst_slack {:.6e}",
                s.checked, s.violations, s.worst_slack
            )
        };
        line(f, "sufficient_decrease", &self.sufficient_decrease)?;
        line(f, "step_condition", &self.step_condition)?;
        match &self.squared_step_bound {
            Some(s) => line(f, "squared_step_bound", s)?,
            None => writeln!(f, "squared_step_bound: not applicable (no gamma)")?,
        }
        match &self.gradient_bound {
            Some(s) => line(f, "gradient_bound", s)?,
            None => writeln!(f, "gradient_bound: not applicable (no delta)")?,
        }
        writeln!(
            f,
            "telescoping: rho*sum(dsymm) {:.10e} <= {:.10e} -> {}",
            self.rho * self.dsymm_sum,
            self.telescoping_bound,
            if self.telescoping_ok { "ok" } else { "VIOLATED" }
        )?;
        writeln!(f, "max_dsymm: {:.10e}", self.max_dsymm)?;
        writeln!(f, "final_dsymm: {:.10e}", self.final_dsymm)?;
        writeln!(f, "tail_mean_dsymm: {:.10e}", self.tail_mean_dsymm)?;
        writeln!(f, "tail_mean_du: {:.10e}", self.tail_mean_du)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridPair;
    use crate::objective::{PhaseUnwrapObjective, QuadraticObjective};
    use crate::potential::{DctL1Potential, QuadraticPotential, SobolevPotential};
    use crate::transforms::{DctPlan, NeumannLaplacian};

    fn quadratic_setup(rows: usize, cols: usize) -> (QuadraticObjective, QuadraticPotential) {
        let b = Grid::from_fn(rows, cols, |i, j| ((i * 3 + j) % 5) as f64 * 0.4 - 1.0);
        (QuadraticObjective::new(b), QuadraticPotential)
    }

    fn noisy_phase(rows: usize, cols: usize) -> PhaseUnwrapObjective {
        // deterministic pseudo-noisy data, amplitude slightly over 1
        let truth = Grid::from_fn(rows, cols, |i, j| (i as f64 * 0.7 - j as f64 * 0.4).sin() * 3.0);
        let f1 = Grid::from_fn(rows, cols, |i, j| {
            truth.get(i, j).cos() + 0.15 * ((i * 31 + j * 17) % 7 ) as f64 / 7.0 - 0.075
        });
        let f2 = Grid::from_fn(rows, cols, |i, j| {
            truth.get(i, j).sin() + 0.15 * ((i * 13 + j * 29) % 11) as f64 / 11.0 - 0.075
        });
        PhaseUnwrapObjective::new(GridPair::new(f1, f2).unwrap())
    }

    #[test]
    fn single_step_to_the_minimiser() {
        let obj = QuadraticObjective::new(Grid::constant(1, 1, 1.0));
        let u = Grid::zeros(1, 1);
        let p = QuadraticPotential.initial_subgradient(&u).unwrap();
        let (u1, p1) = bregman_step(&obj, &QuadraticPotential, &u, &p, 1.0).unwrap();
        assert_eq!(u1.get(0, 0), 1.0);
        assert_eq!(p1.get(0, 0), 1.0);
    }

    #[test]
    fn quadratic_potential_reduces_to_gradient_descent() {
        let obj = noisy_phase(4, 4);
        let mut u = Grid::from_fn(4, 4, |i, j| (i as f64 - j as f64) * 0.3);
        let mut p = u.clone();
        let tau = 1.5;
        for _ in 0..20 {
            let (u1, p1) = bregman_step(&obj, &QuadraticPotential, &u, &p, tau).unwrap();
            let explicit = axpy(-tau, &obj.gradient(&u).unwrap(), &u).unwrap();
            let gap = u1.sub(&explicit).unwrap().norm();
            assert!(gap <= 1e-12, "gap {gap}");
            u = u1;
            p = p1;
        }
    }

    #[test]
    fn bregman_step_rejects_inconsistent_input() {
        let (obj, j) = quadratic_setup(2, 2);
        let u = Grid::zeros(2, 2);
        let bad_p = Grid::constant(2, 2, 3.0);
        assert!(matches!(
            bregman_step(&obj, &j, &u, &bad_p, 1.0),
            Err(Error::SubgradientInconsistent { .. })
        ));
        assert!(bregman_step(&obj, &j, &u, &u, -1.0).is_err());
    }

    #[test]
    fn rho_condition_quadratic_cases() {
        let (obj, j) = quadratic_setup(2, 3);
        let u = Grid::zeros(2, 3);
        let u_next = Grid::constant(2, 3, 0.8);
        // for the quadratic potential p = u, so dsymm = ||du||^2
        let ok = check_rho_condition(&j, &obj, &u, &u_next, &u, &u_next, 1.5, 1.0 / 6.0).unwrap();
        assert!(ok, "equality case must pass within slack");
        let tight = check_rho_condition(&j, &obj, &u, &u_next, &u, &u_next, 1.5, 1.0 / 6.0 + 1e-3)
            .unwrap();
        assert!(!tight, "rho above the equality value must fail");
        let degenerate = check_rho_condition(&j, &obj, &u, &u, &u, &u, 1.5, 123.0).unwrap();
        assert!(degenerate, "zero step always passes");
        let too_long = check_rho_condition(&j, &obj, &u, &u_next, &u, &u_next, 3.0, 1e-6).unwrap();
        assert!(!too_long, "1/tau < L/2 must fail for nonzero steps");
    }

    #[test]
    fn quadratic_run_halves_each_iteration() {
        let b = Grid::zeros(1, 1);
        let obj = QuadraticObjective::new(b);
        let u0 = Grid::constant(1, 1, 1.0);
        let result = run(
            &obj,
            &QuadraticPotential,
            &u0,
            &StepPolicy::fixed(0.5),
            &StoppingRule::max_iters(60).with_gradient_tol(1e-12),
        )
        .unwrap();
        assert_eq!(result.stop_reason, StopReason::GradientNorm);
        for (k, row) in result.trace.rows.iter().enumerate() {
            let expected_e = 0.5 * 0.25f64.powi(k as i32);
            assert!((row.e - expected_e).abs() <= 1e-12 * (1.0 + expected_e));
            assert!(row.e_next <= row.e, "monotone decrease");
        }
        assert!(result.u_final.get(0, 0).abs() <= 1e-11);
    }

    #[test]
    fn zero_iterations_when_already_converged() {
        let (obj, j) = quadratic_setup(3, 3);
        let start = obj.gradient(&Grid::zeros(3, 3)).unwrap().scale(-1.0); // = b
        let e0 = obj.value(&start).unwrap();
        let result = run(
            &obj,
            &j,
            &start,
            &StepPolicy::fixed(1.5),
            &StoppingRule::max_iters(100).with_discrepancy(e0 + 1.0),
        )
        .unwrap();
        assert_eq!(result.iterations, 0);
        assert_eq!(result.stop_reason, StopReason::Discrepancy);
        assert_eq!(result.u_final, start);
        assert_eq!(result.tau_inf, 1.5);
    }

    #[test]
    fn dual_product_identity_holds_along_runs() {
        let obj = noisy_phase(6, 6);
        let potentials: Vec<Box<dyn Potential>> = vec![
            Box::new(QuadraticPotential),
            Box::new(SobolevPotential::new(100.0, NeumannLaplacian::new(6, 6)).unwrap()),
            Box::new(DctL1Potential::new(5.0, 0.01, DctPlan::new(6, 6)).unwrap()),
            Box::new(DctL1Potential::new(5.0, 0.0, DctPlan::new(6, 6)).unwrap()),
        ];
        for j in &potentials {
            let result = run(
                &obj,
                j.as_ref(),
                &Grid::zeros(6, 6),
                &StepPolicy::fixed(1.5),
                &StoppingRule::max_iters(120),
            )
            .unwrap();
            assert_eq!(result.iterations, 120, "{}", j.name());
            for row in &result.trace.rows {
                let lhs = row.grad_dot_du;
                let rhs = -row.dsymm / row.tau;
                assert!(
                    (lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()),
                    "{}: iter {} lhs {lhs} rhs {rhs}",
                    j.name(),
                    row.iter
                );
            }
        }
    }

    #[test]
    fn backtracking_enforces_both_conditions() {
        let obj = noisy_phase(8, 8);
        let j = SobolevPotential::new(100.0, NeumannLaplacian::new(8, 8)).unwrap();
        let result = run(
            &obj,
            &j,
            &Grid::zeros(8, 8),
            &StepPolicy::backtracking(1.5).with_rho(1.0 / 6.0),
            &StoppingRule::max_iters(300),
        )
        .unwrap();
        assert!(result.tau_inf > 0.0);
        for row in &result.trace.rows {
            assert!(row.step_condition_held, "iter {}", row.iter);
            assert!(
                row.descent_violation <= DECREASE_SLACK * (1.0 + row.e.abs()),
                "iter {}: violation {}",
                row.iter,
                row.descent_violation
            );
            assert!(row.e_next + result.trace.rho * row.dsymm <= row.e + DECREASE_SLACK * (1.0 + row.e.abs()));
        }
    }

    #[test]
    fn telescoping_bound_holds() {
        let obj = noisy_phase(8, 8);
        for policy in [StepPolicy::fixed(1.5), StepPolicy::backtracking(1.5)] {
            let result = run(
                &obj,
                &QuadraticPotential,
                &Grid::zeros(8, 8),
                &policy,
                &StoppingRule::max_iters(500).with_gradient_tol(1e-9),
            )
            .unwrap();
            let report = diagnostics_report(&result, &QuadraticPotential, obj.surrogate_l());
            assert!(
                report.telescoping_ok,
                "{:?}: {} > {}",
                policy.mode,
                report.rho * report.dsymm_sum,
                report.telescoping_bound
            );
        }
    }

    #[test]
    fn backtracking_exhaustion_is_an_error() {
        let (obj, j) = quadratic_setup(2, 2);
        let policy = StepPolicy {
            mode: StepMode::Backtracking,
            tau0: 1e8,
            rho: Some(0.5),
            shrink_factor: 0.5,
            max_backtracks: 2,
        };
        let err = run(
            &obj,
            &j,
            &Grid::zeros(2, 2),
            &policy,
            &StoppingRule::max_iters(10),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BacktrackingFailed { iter: 0, .. }));
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let obj = QuadraticObjective::new(Grid::constant(1, 1, 1e200));
        let err = run(
            &obj,
            &QuadraticPotential,
            &Grid::constant(1, 1, -1e200),
            &StepPolicy::fixed(1.5),
            &StoppingRule::max_iters(5),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn invalid_policies_are_rejected() {
        let (obj, j) = quadratic_setup(2, 2);
        let u0 = Grid::zeros(2, 2);
        let stop = StoppingRule::max_iters(5);
        for bad in [
            StepPolicy { tau0: 0.0, ..StepPolicy::fixed(1.0) },
            StepPolicy { shrink_factor: 1.0, ..StepPolicy::fixed(1.0) },
            StepPolicy { max_backtracks: 0, ..StepPolicy::fixed(1.0) },
            StepPolicy::fixed(1.0).with_rho(-1.0),
        ] {
            assert!(run(&obj, &j, &u0, &bad, &stop).is_err());
        }
        assert!(run(&obj, &j, &u0, &StepPolicy::fixed(1.0), &StoppingRule::max_iters(0)).is_err());
        assert!(run(
            &obj,
            &j,
            &u0,
            &StepPolicy::fixed(1.0),
            &StoppingRule::max_iters(5).with_gradient_tol(f64::NAN)
        )
        .is_err());
    }

    #[test]
    fn trace_csv_format_and_determinism() {
        let obj = noisy_phase(5, 5);
        let make = || {
            run(
                &obj,
                &QuadraticPotential,
                &Grid::zeros(5, 5),
                &StepPolicy::fixed(1.5),
                &StoppingRule::max_iters(25),
            )
            .unwrap()
            .trace
            .to_csv_string()
        };
        let csv = make();
        assert_eq!(csv, make(), "identical runs must serialise identically");
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,E,dsymm,grad_norm,tau,descent_violation"
        );
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0], "0");
        // 17 significant digits: mantissa with 16 fractional places
        assert!(fields[1].contains('.') && fields[1].contains('e'));
        let mantissa = fields[1].split('e').next().unwrap();
        assert_eq!(mantissa.split('.').nth(1).unwrap().len(), 16);
        assert_eq!(csv.lines().count(), 26);
    }

    #[test]
    fn diagnostics_report_quadratic_run() {
        let (obj, j) = quadratic_setup(4, 4);
        let result = run(
            &obj,
            &j,
            &Grid::zeros(4, 4),
            &StepPolicy::fixed(0.5).with_rho(1.0 / 6.0),
            &StoppingRule::max_iters(200).with_gradient_tol(1e-10),
        )
        .unwrap();
        let report = diagnostics_report(&result, &j, obj.surrogate_l());
        assert_eq!(report.sufficient_decrease.violations, 0);
        assert_eq!(report.step_condition.violations, 0);
        assert_eq!(report.squared_step_bound.unwrap().violations, 0);
        assert_eq!(report.gradient_bound.unwrap().violations, 0);
        assert!(report.telescoping_ok);
        assert!(report.final_dsymm <= 1e-3 * report.max_dsymm);
        let rendered = report.to_string();
        assert!(rendered.contains("stop_reason: gradient_norm"));
        assert!(rendered.contains("telescoping"));
    }

    #[test]
    fn gradient_bound_holds_for_sobolev_fixed_run() {
        let obj = noisy_phase(8, 8);
        let j = SobolevPotential::new(50.0, NeumannLaplacian::new(8, 8)).unwrap();
        let result = run(
            &obj,
            &j,
            &Grid::zeros(8, 8),
            &StepPolicy::fixed(1.5),
            &StoppingRule::max_iters(200),
        )
        .unwrap();
        let report = diagnostics_report(&result, &j, obj.surrogate_l());
        let bound = report.gradient_bound.unwrap();
        assert_eq!(bound.violations, 0, "worst slack {}", bound.worst_slack);
    }
}
