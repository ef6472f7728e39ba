//! Convex potentials `J` with exact subproblem solvers and Bregman
//! distances.
//!
//! Every potential here contains the quadratic `1/2 ||u||^2`, so the
//! subproblem `argmin_u { J(u) - <p, u> }` is strongly convex with a unique
//! solution, and the symmetric Bregman distance dominates `||u - v||^2`.

use crate::error::{Error, Result};
use crate::grid::{axpy, Grid};
use crate::transforms::{DctPlan, NeumannLaplacian};

/// Largest residual at which a (point, dual) pair still counts as
/// subdifferential-consistent: far above arithmetic noise, far below any
/// step size in use.
pub const SUBGRADIENT_TOL: f64 = 1e-8;

/// A convex potential `J` with an exact subproblem solver.
///
/// `solve_subproblem(p)` returns the unique `u` with `p` in the
/// subdifferential of `J` at `u`; `subgradient_consistency` measures how far
/// a given pair is from that relation (0 means exact). `gamma` and `delta`
/// are strong-convexity moduli: the symmetric Bregman distance of `J`
/// dominates `gamma * ||u - v||^2` and (when `delta` is declared)
/// `delta * ||p - q||^2`. They feed diagnostics only, never the iteration.
pub trait Potential {
    fn value(&self, u: &Grid) -> Result<f64>;

    /// `argmin_u { J(u) - <p, u> }`.
    fn solve_subproblem(&self, p: &Grid) -> Result<Grid>;

    /// Residual measuring whether `p` is a subgradient of `J` at `u`,
    /// normalised by `1 + ||p||`.
    fn subgradient_consistency(&self, u: &Grid, p: &Grid) -> Result<f64>;

    /// The canonical subgradient of `J` at `u`: the gradient where `J` is
    /// smooth, the minimal-norm subgradient otherwise. Used to initialise
    /// the dual variable.
    fn initial_subgradient(&self, u: &Grid) -> Result<Grid>;

    fn gamma(&self) -> Option<f64>;
    fn delta(&self) -> Option<f64>;
    fn name(&self) -> &'static str;
}

fn require_consistent(
    potential: &dyn Potential,
    u: &Grid,
    p: &Grid,
    context: &str,
) -> Result<()> {
    let residual = potential.subgradient_consistency(u, p)?;
    if residual <= SUBGRADIENT_TOL {
        Ok(())
    } else {
        Err(Error::SubgradientInconsistent {
            context: context.to_string(),
            residual,
            tol: SUBGRADIENT_TOL,
        })
    }
}

/// Bregman distance `D_J^q(u, v) = J(u) - J(v) - <q, u - v>` for a
/// subgradient `q` of `J` at `v`. Errors if `(v, q)` is not consistent.
pub fn bregman(potential: &dyn Potential, u: &Grid, v: &Grid, q: &Grid) -> Result<f64> {
    require_consistent(potential, v, q, "bregman distance base point (v, q)")?;
    let d = potential.value(u)? - potential.value(v)? - q.inner(&u.sub(v)?)?;
    Ok(d)
}

/// Symmetric Bregman distance `<u - v, p - q>` for subgradients `p` at `u`
/// and `q` at `v`. Equals the sum of the two one-sided distances.
pub fn symmetric_bregman(
    potential: &dyn Potential,
    u: &Grid,
    v: &Grid,
    p: &Grid,
    q: &Grid,
) -> Result<f64> {
    require_consistent(potential, u, p, "symmetric bregman first pair (u, p)")?;
    require_consistent(potential, v, q, "symmetric bregman second pair (v, q)")?;
    u.sub(v)?.inner(&p.sub(q)?)
}

/// Both Bregman distances of a consistent primal/dual tuple.
#[derive(Debug, Clone, Copy)]
pub struct BregmanDiag {
    /// `D_J^q(u, v)`
    pub d_forward: f64,
    /// `D_J^q(u, v) + D_J^p(v, u) = <u - v, p - q>`
    pub d_symmetric: f64,
}

pub fn bregman_diag(
    potential: &dyn Potential,
    u: &Grid,
    v: &Grid,
    p: &Grid,
    q: &Grid,
) -> Result<BregmanDiag> {
    Ok(BregmanDiag {
        d_forward: bregman(potential, u, v, q)?,
        d_symmetric: symmetric_bregman(potential, u, v, p, q)?,
    })
}

/// `J(u) = 1/2 ||u||^2`; the subproblem solution is `p` itself, and the
/// Bregman iteration reduces to classical gradient descent.
#[derive(Debug, Clone, Default)]
pub struct QuadraticPotential;

impl Potential for QuadraticPotential {
    fn value(&self, u: &Grid) -> Result<f64> {
        Ok(0.5 * u.norm_sq())
    }

    fn solve_subproblem(&self, p: &Grid) -> Result<Grid> {
        Ok(p.clone())
    }

    fn subgradient_consistency(&self, u: &Grid, p: &Grid) -> Result<f64> {
        Ok(u.sub(p)?.norm() / (1.0 + p.norm()))
    }

    fn initial_subgradient(&self, u: &Grid) -> Result<Grid> {
        Ok(u.clone())
    }

    fn gamma(&self) -> Option<f64> {
        Some(1.0)
    }

    fn delta(&self) -> Option<f64> {
        Some(1.0)
    }

    fn name(&self) -> &'static str {
        "quadratic"
    }
}

/// `J(u) = 1/2 ||u||^2 + (alpha/2) ||grad u||^2`: quadratic plus Sobolev
/// smoothing. The subproblem is the linear system `(I + alpha*L) u = p`,
/// solved exactly through the DCT diagonalisation of `L`.
#[derive(Debug, Clone)]
pub struct SobolevPotential {
    alpha: f64,
    lap: NeumannLaplacian,
}

impl SobolevPotential {
    pub fn new(alpha: f64, lap: NeumannLaplacian) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be > 0, got {alpha}")));
        }
        Ok(SobolevPotential { alpha, lap })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn grad_j(&self, u: &Grid) -> Result<Grid> {
        axpy(self.alpha, &self.lap.apply(u)?, u)
    }
}

impl Potential for SobolevPotential {
    fn value(&self, u: &Grid) -> Result<f64> {
        let lu = self.lap.apply(u)?;
        Ok(0.5 * u.norm_sq() + 0.5 * self.alpha * lu.inner(u)?)
    }

    fn solve_subproblem(&self, p: &Grid) -> Result<Grid> {
        self.lap.solve_identity_plus_alpha(self.alpha, p)
    }

    fn subgradient_consistency(&self, u: &Grid, p: &Grid) -> Result<f64> {
        Ok(self.grad_j(u)?.sub(p)?.norm() / (1.0 + p.norm()))
    }

    fn initial_subgradient(&self, u: &Grid) -> Result<Grid> {
        self.grad_j(u)
    }

    fn gamma(&self) -> Option<f64> {
        Some(1.0)
    }

    fn delta(&self) -> Option<f64> {
        // grad J is Lipschitz with constant 1 + alpha*lambda_max, so the
        // dual pairing <u - v, p - q> dominates ||p - q||^2 / that constant.
        Some(1.0 / (1.0 + self.alpha * self.lap.lambda_max()))
    }

    fn name(&self) -> &'static str {
        "sobolev"
    }
}

/// Huber penalty `h_mu` applied to a scalar: quadratic of curvature `1/mu`
/// inside `[-mu, mu]`, absolute value minus `mu/2` outside. `mu = 0` is the
/// plain absolute value.
fn huber(t: f64, mu: f64) -> f64 {
    if mu > 0.0 && t.abs() <= mu {
        t * t / (2.0 * mu)
    } else {
        t.abs() - mu / 2.0
    }
}

/// Derivative of `h_mu` (for `mu > 0`): `t/mu` clamped to [-1, 1].
fn huber_prime(t: f64, mu: f64) -> f64 {
    (t / mu).clamp(-1.0, 1.0)
}

/// Solves the scalar subproblem `c + alpha * h_mu'(c) = z` in closed form.
///
/// For `mu = 0` this is soft thresholding; for `mu > 0` the two branches
/// meet continuously at `|z| = mu + alpha`.
fn huber_shrink(z: f64, alpha: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        z.signum() * (z.abs() - alpha).max(0.0)
    } else if z.abs() <= mu + alpha {
        z / (1.0 + alpha / mu)
    } else {
        z - alpha * z.signum()
    }
}

/// `J(u) = 1/2 ||u||^2 + alpha * ||C u||_1` with `C` the orthonormal 2D
/// DCT-II, optionally Huberised with radius `mu`.
///
/// The subproblem shrinks each DCT coefficient independently. With `mu = 0`
/// the potential is non-smooth and no dual strong-convexity modulus exists
/// (`delta` is `None`); any `mu > 0` restores it with
/// `delta = 1 / (1 + alpha/mu)`.
#[derive(Debug, Clone)]
pub struct DctL1Potential {
    alpha: f64,
    mu: f64,
    plan: DctPlan,
}

impl DctL1Potential {
    pub fn new(alpha: f64, mu: f64, plan: DctPlan) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be > 0, got {alpha}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("must be >= 0, got {mu}")));
        }
        Ok(DctL1Potential { alpha, mu, plan })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Coefficients whose magnitude falls below this are treated as exact
    /// zeros of the shrinkage (the inverse/forward transform round trip
    /// perturbs true zeros by arithmetic noise).
    fn zero_tol(c: &Grid) -> f64 {
        let max_abs = c.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        1e-10 * (1.0 + max_abs)
    }
}

impl Potential for DctL1Potential {
    fn value(&self, u: &Grid) -> Result<f64> {
        let c = self.plan.dct2(u)?;
        let penalty: f64 = c.values().iter().map(|&t| huber(t, self.mu)).sum();
        Ok(0.5 * u.norm_sq() + self.alpha * penalty)
    }

    fn solve_subproblem(&self, p: &Grid) -> Result<Grid> {
        let z = self.plan.dct2(p)?;
        let c = z.map(|t| huber_shrink(t, self.alpha, self.mu));
        self.plan.idct2(&c)
    }

    fn subgradient_consistency(&self, u: &Grid, p: &Grid) -> Result<f64> {
        if self.mu > 0.0 {
            return Ok(self.initial_subgradient(u)?.sub(p)?.norm() / (1.0 + p.norm()));
        }
        // mu = 0: measure, coefficientwise, the distance of C(p - u) to
        // alpha * (subdifferential of |.| at Cu).
        let c = self.plan.dct2(u)?;
        let w = self.plan.dct2(&p.sub(u)?)?;
        let tol = Self::zero_tol(&c);
        let mut dist_sq = 0.0;
        for (&ci, &wi) in c.values().iter().zip(w.values()) {
            let d = if ci.abs() > tol {
                wi - self.alpha * ci.signum()
            } else {
                (wi.abs() - self.alpha).max(0.0)
            };
            dist_sq += d * d;
        }
        Ok(dist_sq.sqrt() / (1.0 + p.norm()))
    }

    fn initial_subgradient(&self, u: &Grid) -> Result<Grid> {
        let c = self.plan.dct2(u)?;
        let s = if self.mu > 0.0 {
            c.map(|t| huber_prime(t, self.mu))
        } else {
            let tol = Self::zero_tol(&c);
            c.map(|t| if t.abs() > tol { t.signum() } else { 0.0 })
        };
        axpy(self.alpha, &self.plan.idct2(&s)?, u)
    }

    fn gamma(&self) -> Option<f64> {
        Some(1.0)
    }

    fn delta(&self) -> Option<f64> {
        if self.mu > 0.0 {
            Some(1.0 / (1.0 + self.alpha / self.mu))
        } else {
            None
        }
    }

    fn name(&self) -> &'static str {
        "dct_l1"
    }
}
