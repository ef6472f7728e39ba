//! Smooth (possibly non-convex) objectives with gradients and the metadata
//! the solver needs: a quadratic-majorant constant and a lower bound.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridPair};

/// A smooth objective `E` to be driven downhill.
///
/// `surrogate_l` is the constant `L` of the quadratic majorant
/// `F(u) = (L/2)||u||^2`: the solver's descent theory assumes `F - E` is
/// convex. `lower_bound` must satisfy `value(u) >= lower_bound` everywhere;
/// it enters the telescoping summability bound.
pub trait Objective {
    fn value(&self, u: &Grid) -> Result<f64>;
    fn gradient(&self, u: &Grid) -> Result<Grid>;
    fn surrogate_l(&self) -> f64;
    fn lower_bound(&self) -> f64;
}

/// Phase-unwrapping data fit: `E(u) = 1/2 sum[(cos u - f1)^2 + (sin u - f2)^2]`.
///
/// `f = (f1, f2)` are noisy observations of `(cos t, sin t)` for an unknown
/// phase field `t`. The objective is smooth, bounded below by zero, and
/// non-convex (periodic in every pixel).
///
/// The majorant constant is fixed to `L = 1`, the exact curvature bound for
/// noise-free data. Noisy data can push pointwise curvature slightly above 1
/// (amplitude `sqrt(f1^2 + f2^2)` may exceed 1), which surfaces as recorded
/// descent violations rather than a different `L`; see the solver's
/// diagnostics.
#[derive(Debug, Clone)]
pub struct PhaseUnwrapObjective {
    data: GridPair,
}

impl PhaseUnwrapObjective {
    pub fn new(data: GridPair) -> Self {
        PhaseUnwrapObjective { data }
    }

    pub fn data(&self) -> &GridPair {
        &self.data
    }

    fn check_shape(&self, u: &Grid) -> Result<()> {
        if u.shape() == self.data.shape() {
            Ok(())
        } else {
            let (r, c) = self.data.shape();
            Err(Error::ShapeMismatch(r, c, u.rows(), u.cols()))
        }
    }
}

impl Objective for PhaseUnwrapObjective {
    fn value(&self, u: &Grid) -> Result<f64> {
        self.check_shape(u)?;
        let f1 = self.data.first().values();
        let f2 = self.data.second().values();
        let mut total = 0.0;
        for ((&ui, &a), &b) in u.values().iter().zip(f1).zip(f2) {
            let (s, c) = ui.sin_cos();
            total += 0.5 * ((c - a) * (c - a) + (s - b) * (s - b));
        }
        if !total.is_finite() {
            return Err(Error::NonFinite("phase objective value".into()));
        }
        Ok(total)
    }

    fn gradient(&self, u: &Grid) -> Result<Grid> {
        self.check_shape(u)?;
        let f1 = self.data.first();
        let f2 = self.data.second();
        Ok(Grid::from_fn(u.rows(), u.cols(), |i, j| {
            let (s, c) = u.get(i, j).sin_cos();
            f1.get(i, j) * s - f2.get(i, j) * c
        }))
    }

    fn surrogate_l(&self) -> f64 {
        1.0
    }

    fn lower_bound(&self) -> f64 {
        0.0
    }
}

/// Convex sanity objective `E(u) = 1/2 ||u - b||^2` with known minimiser.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    b: Grid,
}

impl QuadraticObjective {
    pub fn new(b: Grid) -> Self {
        QuadraticObjective { b }
    }

    fn check_shape(&self, u: &Grid) -> Result<()> {
        if u.same_shape(&self.b) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                self.b.rows(),
                self.b.cols(),
                u.rows(),
                u.cols(),
            ))
        }
    }
}

impl Objective for QuadraticObjective {
    fn value(&self, u: &Grid) -> Result<f64> {
        self.check_shape(u)?;
        Ok(0.5 * u.sub(&self.b)?.norm_sq())
    }

    fn gradient(&self, u: &Grid) -> Result<Grid> {
        self.check_shape(u)?;
        u.sub(&self.b)
    }

    fn surrogate_l(&self) -> f64 {
        1.0
    }

    fn lower_bound(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::axpy;
    use proptest::prelude::*;

    fn pair(rows: usize, cols: usize, f1: &[f64], f2: &[f64]) -> GridPair {
        GridPair::new(
            Grid::new(rows, cols, f1.to_vec()).unwrap(),
            Grid::new(rows, cols, f2.to_vec()).unwrap(),
        )
        .unwrap()
    }

    fn exact_data(truth: &Grid) -> GridPair {
        GridPair::new(truth.map(f64::cos), truth.map(f64::sin)).unwrap()
    }

    /// Central finite differences of `value`, the reference for gradients.
    fn fd_gradient(obj: &dyn Objective, u: &Grid, h: f64) -> Grid {
        Grid::from_fn(u.rows(), u.cols(), |i, j| {
            let bump = |delta: f64| {
                let mut v = u.values().to_vec();
                v[i * u.cols() + j] += delta;
                obj.value(&Grid::new(u.rows(), u.cols(), v).unwrap()).unwrap()
            };
            (bump(h) - bump(-h)) / (2.0 * h)
        })
    }

    #[test]
    fn phase_value_zero_at_exact_data() {
        let truth = Grid::from_fn(3, 4, |i, j| (i as f64 - j as f64) * 0.8);
        let obj = PhaseUnwrapObjective::new(exact_data(&truth));
        assert!(obj.value(&truth).unwrap().abs() <= 1e-15);
        assert!(obj.gradient(&truth).unwrap().norm() <= 1e-15);
    }

    #[test]
    fn phase_value_single_pixel_cases() {
        let obj = PhaseUnwrapObjective::new(pair(1, 1, &[1.0], &[0.0]));
        let u = Grid::constant(1, 1, std::f64::consts::FRAC_PI_2);
        assert!((obj.value(&u).unwrap() - 1.0).abs() <= 1e-15);
        assert!((obj.gradient(&u).unwrap().get(0, 0) - 1.0).abs() <= 1e-15);

        let obj = PhaseUnwrapObjective::new(pair(1, 1, &[0.0], &[0.0]));
        let u = Grid::zeros(1, 1);
        assert!((obj.value(&u).unwrap() - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn phase_value_shape_mismatch() {
        let obj = PhaseUnwrapObjective::new(pair(1, 2, &[1.0, 0.0], &[0.0, 1.0]));
        assert!(obj.value(&Grid::zeros(2, 1)).is_err());
        assert!(obj.gradient(&Grid::zeros(2, 2)).is_err());
    }

    #[test]
    fn quadratic_objective_basics() {
        let b = Grid::new(1, 2, vec![2.0, -1.0]).unwrap();
        let obj = QuadraticObjective::new(b.clone());
        assert_eq!(obj.value(&b).unwrap(), 0.0);
        assert_eq!(obj.gradient(&b).unwrap().norm_sq(), 0.0);

        let e1 = Grid::new(1, 2, vec![1.0, 0.0]).unwrap();
        let u = b.add(&e1).unwrap();
        assert!((obj.value(&u).unwrap() - 0.5).abs() <= 1e-15);
        assert_eq!(obj.gradient(&u).unwrap(), e1);
    }

    #[test]
    fn gradient_descent_on_quadratic_contracts() {
        let b = Grid::from_fn(3, 3, |i, j| (i + 2 * j) as f64 * 0.5 - 1.0);
        let obj = QuadraticObjective::new(b.clone());
        for tau in [0.5, 1.0, 1.9] {
            let mut u = Grid::zeros(3, 3);
            for _ in 0..200 {
                u = axpy(-tau, &obj.gradient(&u).unwrap(), &u).unwrap();
            }
            let err = u.sub(&b).unwrap().norm();
            let expected = (1.0 - tau).abs().powi(200) * b.norm();
            assert!(err <= expected + 1e-10, "tau={tau}: err {err}");
        }
    }

    proptest! {
        // FALSIFY: the analytic gradient must match finite differences.
        #[test]
        fn phase_gradient_matches_finite_differences(
            u in proptest::collection::vec(-3.0..3.0f64, 25),
            f1 in proptest::collection::vec(-1.2..1.2f64, 25),
            f2 in proptest::collection::vec(-1.2..1.2f64, 25),
        ) {
            let u = Grid::new(5, 5, u).unwrap();
            let obj = PhaseUnwrapObjective::new(pair(5, 5, &f1, &f2));
            let g = obj.gradient(&u).unwrap();
            let fd = fd_gradient(&obj, &u, 1e-5);
            let err = g.sub(&fd).unwrap().norm();
            prop_assert!(err <= 1e-6 * (1.0 + g.norm()), "fd mismatch {err}");
        }

        // FALSIFY: same for the quadratic objective.
        #[test]
        fn quadratic_gradient_matches_finite_differences(
            u in proptest::collection::vec(-5.0..5.0f64, 16),
            b in proptest::collection::vec(-5.0..5.0f64, 16),
        ) {
            let u = Grid::new(4, 4, u).unwrap();
            let obj = QuadraticObjective::new(Grid::new(4, 4, b).unwrap());
            let g = obj.gradient(&u).unwrap();
            let fd = fd_gradient(&obj, &u, 1e-5);
            let err = g.sub(&fd).unwrap().norm();
            prop_assert!(err <= 1e-5 * (1.0 + g.norm()));
        }

        // FALSIFY: the gradient is an amplitude-bounded sinusoid per pixel.
        #[test]
        fn phase_gradient_is_amplitude_bounded(
            u in proptest::collection::vec(-10.0..10.0f64, 12),
            f1 in proptest::collection::vec(-2.0..2.0f64, 12),
            f2 in proptest::collection::vec(-2.0..2.0f64, 12),
        ) {
            let u = Grid::new(3, 4, u).unwrap();
            let obj = PhaseUnwrapObjective::new(pair(3, 4, &f1, &f2));
            let g = obj.gradient(&u).unwrap();
            for (gi, (a, b)) in g.values().iter().zip(f1.iter().zip(&f2)) {
                let amplitude = (a * a + b * b).sqrt();
                prop_assert!(gi.abs() <= amplitude + 1e-12);
            }
        }

        // FALSIFY: the two algebraic forms of the phase value must agree.
        #[test]
        fn phase_value_expanded_form_agrees(
            u in proptest::collection::vec(-4.0..4.0f64, 20),
            f1 in proptest::collection::vec(-1.5..1.5f64, 20),
            f2 in proptest::collection::vec(-1.5..1.5f64, 20),
        ) {
            let u = Grid::new(4, 5, u).unwrap();
            let obj = PhaseUnwrapObjective::new(pair(4, 5, &f1, &f2));
            let direct = obj.value(&u).unwrap();
            let mut expanded = 0.0;
            for ((&ui, &a), &b) in u.values().iter().zip(&f1).zip(&f2) {
                expanded += 0.5 * (1.0 + a * a + b * b) - (a * ui.cos() + b * ui.sin());
            }
            prop_assert!((direct - expanded).abs() <= 1e-10 * (1.0 + direct.abs()));
        }

        // FALSIFY: values never dip below the declared lower bound.
        #[test]
        fn phase_value_respects_lower_bound(
            u in proptest::collection::vec(-10.0..10.0f64, 9),
            f1 in proptest::collection::vec(-2.0..2.0f64, 9),
            f2 in proptest::collection::vec(-2.0..2.0f64, 9),
        ) {
            let u = Grid::new(3, 3, u).unwrap();
            let obj = PhaseUnwrapObjective::new(pair(3, 3, &f1, &f2));
            prop_assert!(obj.value(&u).unwrap() >= obj.lower_bound());
        }
    }
}
