//! Check of `‖f − P_h f‖_{L²} ≤ C h ‖∇f‖_{L²}` with `C = 3^{1+n/2} √n / π`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::projection::{l2_error, l2_project};
use crate::ifs::{AttractorModel, Cell, FractalMesh, Point};
use crate::quadrature::integrate_on_cell;

pub fn poincare_constant(n: usize) -> f64 {
    3f64.powf(1.0 + n as f64 / 2.0) * (n as f64).sqrt() / std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub h: f64,
    pub constant: f64,
    pub error: f64,
    pub gradient_norm: f64,
    pub bound: f64,
    /// `error / bound`; zero when the bound vanishes.
    pub slack_ratio: f64,
    pub holds: bool,
}

/// Projects `f` onto `mesh` and compares the L² error with the bound, the
/// gradient norm taken over `Γ` with the analytic `grad`.
pub fn poincare_bound_check<F, G>(model: &AttractorModel, mesh: &FractalMesh, f: F, grad: G, h_q: f64) -> PoincareReport
where
    F: Fn(&Point) -> f64,
    G: Fn(&Point) -> Point,
{
    let fc = |p: &Point| Complex64::new(f(p), 0.0);
    let q = l2_project(model, mesh, fc, h_q);
    let error = l2_error(model, &q, fc, h_q);
    let f_norm = integrate_on_cell(model, &Cell::root(model), |p| f(p) * f(p), h_q).sqrt();
    let gradient_norm = integrate_on_cell(model, &Cell::root(model), |p| grad(p).norm_squared(), h_q).sqrt();
    let h = mesh.h();
    let constant = poincare_constant(model.n());
    let bound = constant * h * gradient_norm;
    PoincareReport {
        h,
        constant,
        error,
        gradient_norm,
        bound,
        slack_ratio: if bound > 0.0 { error / bound } else { 0.0 },
        holds: error <= bound + 1e-12 * f_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{generate_diameter_mesh, library};
    use std::f64::consts::PI;

    #[test]
    fn constant_value() {
        assert!((poincare_constant(2) - 9.0 * 2f64.sqrt() / PI).abs() < 1e-14);
    }

    #[test]
    fn linear_on_square() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let mesh = generate_diameter_mesh(&model, 0.25).unwrap();
        let r = poincare_bound_check(&model, &mesh, |p| p.x, |_| Point::new(1.0, 0.0), 1e-3);
        // cells of side 1/8
        let exact = 0.125 / (2.0 * 3f64.sqrt());
        assert!((r.error - exact).abs() < 1e-3 * exact, "{r:?}");
        assert!(r.holds && r.slack_ratio < 0.05);
    }

    #[test]
    fn constant_function() {
        let model = AttractorModel::new(library::koch_snowflake()).unwrap();
        let mesh = generate_diameter_mesh(&model, model.h0() / 3.0).unwrap();
        let r = poincare_bound_check(&model, &mesh, |_| 1.0, |_| Point::zeros(), 0.05);
        assert!(r.holds && r.error < 1e-12 && r.bound == 0.0);
    }
}
