//! Bregman distances and strong-convexity moduli, numerically.
//!
//! For a convex potential J with subgradient q at v, the Bregman distance
//! D_J^q(u, v) = J(u) − J(v) − ⟨q, u − v⟩ is nonnegative and vanishes at
//! u = v; the symmetric form D_symm = D^q(u,v) + D^p(v,u) = ⟨u − v, p − q⟩
//! is the solver's per-step progress measure. Each potential also reports
//! moduli γ, δ with
//!
//!     γ·‖u − v‖² ≤ D_symm      and      δ·‖p − q‖² ≤ D_symm,
//!
//! which is what converts summability of D_symm into convergence of the
//! iterates (γ) and of the gradients (δ). This example builds consistent
//! primal/dual pairs for all three potentials by solving the subproblem at
//! random dual points and checks every inequality.
//!
//! Run with: cargo run --release -p linbreg --example bregman_distances

use linbreg::{
    bregman, symmetric_bregman, DctL1Potential, DctPlan, GaussianSampler, Grid,
    NeumannLaplacian, Potential, QuadraticPotential, SobolevPotential,
};

fn random_grid(rows: usize, cols: usize, seed: u64) -> Grid {
    let mut g = GaussianSampler::new(seed);
    Grid::from_fn(rows, cols, |_, _| 2.0 * g.next())
}

fn main() -> linbreg::Result<()> {
    let (rows, cols) = (12, 12);
    let potentials: Vec<Box<dyn Potential>> = vec![
        Box::new(QuadraticPotential),
        Box::new(SobolevPotential::new(5.0, NeumannLaplacian::new(rows, cols))?),
        Box::new(DctL1Potential::new(0.8, 0.05, DctPlan::new(rows, cols))?),
    ];

    for pot in &potentials {
        // A consistent (u, p) pair for any p: u = argmin J(u) - <p, u>
        // puts p into the subdifferential of J at u.
        let p1 = random_grid(rows, cols, 7);
        let p2 = random_grid(rows, cols, 8);
        let u1 = pot.solve_subproblem(&p1)?;
        let u2 = pot.solve_subproblem(&p2)?;

        let d12 = bregman(pot.as_ref(), &u1, &u2, &p2)?;
        let d21 = bregman(pot.as_ref(), &u2, &u1, &p1)?;
        let dsym = symmetric_bregman(pot.as_ref(), &u1, &u2, &p1, &p2)?;
        let self_dist = bregman(pot.as_ref(), &u1, &u1, &p1)?;

        println!("potential = {}", pot.name());
        println!("    D(u1; u2) = {d12:.6}   D(u2; u1) = {d21:.6}   (both >= 0)");
        println!(
            "    symmetric distance = {dsym:.6}, one-sided sum = {:.6}",
            d12 + d21
        );
        println!("    D(u; u) = {self_dist:.2e}");

        let du = u1.sub(&u2)?.norm_sq();
        let dp = p1.sub(&p2)?.norm_sq();
        match pot.gamma() {
            Some(gamma) => println!(
                "    primal modulus: gamma*||u1-u2||^2 = {:.6} <= {dsym:.6}",
                gamma * du
            ),
            None => println!("    primal modulus unavailable for this potential"),
        }
        match pot.delta() {
            Some(delta) => println!(
                "    dual modulus:   delta*||p1-p2||^2 = {:.6} <= {dsym:.6}",
                delta * dp
            ),
            None => println!("    dual modulus unavailable for this potential"),
        }
        println!();
    }
    Ok(())
}
