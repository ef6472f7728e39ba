//! Tour of the transform layer: orthonormal 2-D cosine transform, discrete
//! gradient/divergence, and the Neumann Laplacian with its closed-form
//! diagonalisation.
//!
//! Facts demonstrated numerically:
//!   - the cosine transform is an isometry (round-trip and Parseval),
//!   - the divergence is the exact negative adjoint of the gradient,
//!     ⟨∇u, g⟩ = −⟨u, div g⟩, so the Laplacian L = −div∘grad is symmetric
//!     positive semidefinite with ⟨u, Lu⟩ = ‖∇u‖²,
//!   - L is diagonal in the cosine basis with eigenvalues
//!     (2 − 2cos(πi/m)) + (2 − 2cos(πj/n)), which makes (I + αL)x = p
//!     solvable in three transforms,
//!   - the flat grid spans the kernel of L (Neumann boundary).
//!
//! Run with: cargo run --release -p linbreg --example transforms_tour

use linbreg::{divergence, gradient, DctPlan, GaussianSampler, Grid, NeumannLaplacian};

fn random_grid(rows: usize, cols: usize, seed: u64) -> Grid {
    let mut g = GaussianSampler::new(seed);
    Grid::from_fn(rows, cols, |_, _| g.next())
}

fn main() -> linbreg::Result<()> {
    let (rows, cols) = (24, 17);
    let plan = DctPlan::new(rows, cols);
    let u = random_grid(rows, cols, 3);

    // Isometry.
    let c = plan.dct2(&u)?;
    let back = plan.idct2(&c)?;
    println!(
        "round-trip error ‖idct(dct(u)) − u‖ = {:.3e}",
        back.sub(&u)?.norm()
    );
    println!(
        "Parseval defect |‖c‖² − ‖u‖²| = {:.3e}",
        (c.norm_sq() - u.norm_sq()).abs()
    );

    // Adjointness of gradient and divergence.
    let g = linbreg::GridPair::new(random_grid(rows, cols, 4), random_grid(rows, cols, 5))?;
    let grad_u = gradient(&u);
    let div_g = divergence(&g);
    let lhs = grad_u.inner(&g)?;
    let rhs = -u.inner(&div_g)?;
    println!("adjoint defect |⟨∇u, g⟩ + ⟨u, div g⟩| = {:.3e}", (lhs - rhs).abs());

    // Laplacian: energy identity and spectral solve.
    let lap = NeumannLaplacian::new(rows, cols);
    let lu = lap.apply(&u)?;
    println!(
        "energy identity |⟨u, Lu⟩ − ‖∇u‖²| = {:.3e}",
        (u.inner(&lu)? - grad_u.norm_sq()).abs()
    );
    println!(
        "assembled vs. diagonalised apply: ‖Lu − C⁻¹ΛCu‖ = {:.3e}",
        lu.sub(&lap.apply_via_dct(&u)?)?.norm()
    );

    let alpha = 37.5;
    let x = lap.solve_identity_plus_alpha(alpha, &u)?;
    let residual = x.add(&lap.apply(&x)?.scale(alpha))?.sub(&u)?;
    println!(
        "screened-Poisson solve residual ‖(I + αL)x − p‖ = {:.3e}",
        residual.norm()
    );

    let flat = Grid::constant(rows, cols, 1.0);
    println!(
        "Neumann kernel: ‖L·1‖ = {:.3e}, λ_max = {:.6}",
        lap.apply(&flat)?.norm(),
        lap.lambda_max()
    );
    Ok(())
}
