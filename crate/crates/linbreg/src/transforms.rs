//! Orthonormal 2D DCT-II, discrete gradient/divergence, and the Neumann
//! Laplacian with a direct solver for (I + alpha*L)u = p.
//!
//! The gradient uses forward differences with a replicate boundary (the
//! far-edge difference is zero). That choice makes L = -div(grad(.)) exactly
//! the second-difference operator the DCT-II basis diagonalises, so the
//! shifted system solves in two transforms and an elementwise divide.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridPair};

/// Precomputed cosine bases for the separable orthonormal 2D DCT-II on a
/// fixed shape. Immutable after construction and cheap to share.
#[derive(Debug, Clone)]
pub struct DctPlan {
    rows: usize,
    cols: usize,
    /// rows x rows, row-major: row_basis[k*rows + i] = s_k cos(pi k (2i+1) / (2 rows))
    row_basis: Vec<f64>,
    /// cols x cols, same layout along the column index
    col_basis: Vec<f64>,
}

fn dct_basis(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n * n];
    let norm0 = (1.0 / n as f64).sqrt();
    let norm = (2.0 / n as f64).sqrt();
    for k in 0..n {
        let s = if k == 0 { norm0 } else { norm };
        for i in 0..n {
            let angle = std::f64::consts::PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n as f64);
            b[k * n + i] = s * angle.cos();
        }
    }
    b
}

// y = m * x, with m of shape out_n x in_n and x of shape in_n x cols
fn mat_times(m: &[f64], out_n: usize, in_n: usize, x: &[f64], cols: usize) -> Vec<f64> {
    let mut y = vec![0.0; out_n * cols];
    for k in 0..out_n {
        let yk = &mut y[k * cols..(k + 1) * cols];
        for i in 0..in_n {
            let coeff = m[k * in_n + i];
            let xi = &x[i * cols..(i + 1) * cols];
            for (yv, xv) in yk.iter_mut().zip(xi) {
                *yv += coeff * xv;
            }
        }
    }
    y
}

// y = m^T * x, with m of shape in_n x out_n and x of shape in_n x cols
fn mat_transpose_times(m: &[f64], in_n: usize, out_n: usize, x: &[f64], cols: usize) -> Vec<f64> {
    let mut y = vec![0.0; out_n * cols];
    for k in 0..in_n {
        let xk = &x[k * cols..(k + 1) * cols];
        for i in 0..out_n {
            let coeff = m[k * out_n + i];
            let yi = &mut y[i * cols..(i + 1) * cols];
            for (yv, xv) in yi.iter_mut().zip(xk) {
                *yv += coeff * xv;
            }
        }
    }
    y
}

// y = x * b^T, with x of shape rows x n and b of shape m x n
fn times_transpose(x: &[f64], rows: usize, n: usize, b: &[f64], m: usize) -> Vec<f64> {
    let mut y = vec![0.0; rows * m];
    for r in 0..rows {
        let xr = &x[r * n..(r + 1) * n];
        for l in 0..m {
            let bl = &b[l * n..(l + 1) * n];
            y[r * m + l] = xr.iter().zip(bl).map(|(a, c)| a * c).sum();
        }
    }
    y
}

// y = x * b, with x of shape rows x n and b of shape n x m
fn times(x: &[f64], rows: usize, n: usize, b: &[f64], m: usize) -> Vec<f64> {
    let mut y = vec![0.0; rows * m];
    for r in 0..rows {
        let yr = &mut y[r * m..(r + 1) * m];
        for l in 0..n {
            let coeff = x[r * n + l];
            let bl = &b[l * m..(l + 1) * m];
            for (yv, bv) in yr.iter_mut().zip(bl) {
                *yv += coeff * bv;
            }
        }
    }
    y
}

impl DctPlan {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "plan dimensions must be positive");
        DctPlan {
            rows,
            cols,
            row_basis: dct_basis(rows),
            col_basis: dct_basis(cols),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn check_shape(&self, g: &Grid) -> Result<()> {
        if g.shape() == (self.rows, self.cols) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(self.rows, self.cols, g.rows(), g.cols()))
        }
    }

    /// Forward orthonormal 2D DCT-II coefficients of `x`.
    pub fn dct2(&self, x: &Grid) -> Result<Grid> {
        self.check_shape(x)?;
        let t = mat_times(&self.row_basis, self.rows, self.rows, x.values(), self.cols);
        let y = times_transpose(&t, self.rows, self.cols, &self.col_basis, self.cols);
        Grid::new(self.rows, self.cols, y)
    }

    /// Inverse transform; exact transpose of `dct2` since the basis is
    /// orthonormal.
    pub fn idct2(&self, c: &Grid) -> Result<Grid> {
        self.check_shape(c)?;
        let t = mat_transpose_times(&self.row_basis, self.rows, self.rows, c.values(), self.cols);
        let y = times(&t, self.rows, self.cols, &self.col_basis, self.cols);
        Grid::new(self.rows, self.cols, y)
    }
}

/// Forward-difference gradient with replicate boundary: the difference at
/// the far edge of each axis is zero. `first` differentiates along columns,
/// `second` along rows.
pub fn gradient(u: &Grid) -> GridPair {
    let (rows, cols) = u.shape();
    let gx = Grid::from_fn(rows, cols, |i, j| {
        if j + 1 < cols {
            u.get(i, j + 1) - u.get(i, j)
        } else {
            0.0
        }
    });
    let gy = Grid::from_fn(rows, cols, |i, j| {
        if i + 1 < rows {
            u.get(i + 1, j) - u.get(i, j)
        } else {
            0.0
        }
    });
    GridPair::new(gx, gy).expect("components share the shape of u")
}

/// Negative adjoint of [`gradient`]: `inner(gradient(u), g)` equals
/// `-inner(u, divergence(g))` for every `u`, `g`.
///
/// Note the far-edge component of `g` never enters (the matching gradient
/// entry is identically zero).
pub fn divergence(g: &GridPair) -> Grid {
    let (rows, cols) = g.shape();
    let gx = g.first();
    let gy = g.second();
    Grid::from_fn(rows, cols, |i, j| {
        let mut v = 0.0;
        if j + 1 < cols {
            v += gx.get(i, j);
        }
        if j >= 1 {
            v -= gx.get(i, j - 1);
        }
        if i + 1 < rows {
            v += gy.get(i, j);
        }
        if i >= 1 {
            v -= gy.get(i - 1, j);
        }
        v
    })
}

/// The discrete Neumann Laplacian L = -div(grad(.)) on a fixed shape,
/// together with its eigenvalues in the DCT-II basis:
/// lambda_ij = (2 - 2cos(pi i / rows)) + (2 - 2cos(pi j / cols)).
#[derive(Debug, Clone)]
pub struct NeumannLaplacian {
    eigenvalues: Grid,
    lambda_max: f64,
    plan: DctPlan,
}

impl NeumannLaplacian {
    pub fn new(rows: usize, cols: usize) -> Self {
        let eigenvalues = Grid::from_fn(rows, cols, |i, j| {
            let li = 2.0 - 2.0 * (std::f64::consts::PI * i as f64 / rows as f64).cos();
            let lj = 2.0 - 2.0 * (std::f64::consts::PI * j as f64 / cols as f64).cos();
            li + lj
        });
        let lambda_max = eigenvalues.max();
        NeumannLaplacian {
            eigenvalues,
            lambda_max,
            plan: DctPlan::new(rows, cols),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.eigenvalues.shape()
    }

    pub fn eigenvalues(&self) -> &Grid {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn plan(&self) -> &DctPlan {
        &self.plan
    }

    fn check_shape(&self, g: &Grid) -> Result<()> {
        if g.shape() == self.shape() {
            Ok(())
        } else {
            let (r, c) = self.shape();
            Err(Error::ShapeMismatch(r, c, g.rows(), g.cols()))
        }
    }

    /// Applies L by the stencil -div(grad(u)).
    pub fn apply(&self, u: &Grid) -> Result<Grid> {
        self.check_shape(u)?;
        Ok(divergence(&gradient(u)).scale(-1.0))
    }

    /// Applies L through its eigendecomposition; agrees with [`Self::apply`]
    /// to transform accuracy.
    pub fn apply_via_dct(&self, u: &Grid) -> Result<Grid> {
        self.check_shape(u)?;
        let c = self.plan.dct2(u)?;
        let scaled = Grid::from_fn(c.rows(), c.cols(), |i, j| {
            c.get(i, j) * self.eigenvalues.get(i, j)
        });
        self.plan.idct2(&scaled)
    }

    /// Solves (I + alpha*L) u = p exactly via the DCT diagonalisation.
    pub fn solve_identity_plus_alpha(&self, alpha: f64, p: &Grid) -> Result<Grid> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be >= 0, got {alpha}")));
        }
        self.check_shape(p)?;
        let c = self.plan.dct2(p)?;
        let scaled = Grid::from_fn(c.rows(), c.cols(), |i, j| {
            c.get(i, j) / (1.0 + alpha * self.eigenvalues.get(i, j))
        });
        self.plan.idct2(&scaled)
    }
}
