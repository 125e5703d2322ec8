//! Piecewise-constant functions on fractal meshes and the L² projection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, FractalMesh, Point};
use crate::quadrature::integrate_on_cell;

/// One value per mesh cell (unnormalized indicator basis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    pub mesh: FractalMesh,
    pub coefficients: Vec<Complex64>,
}

impl PiecewiseConstant {
    pub fn new(mesh: FractalMesh, coefficients: Vec<Complex64>) -> Result<Self> {
        if mesh.len() != coefficients.len() {
            return Err(Error::invalid(
                "coefficients",
                format!("{} values for {} cells", coefficients.len(), mesh.len()),
            ));
        }
        Ok(Self { mesh, coefficients })
    }

    pub fn from_real(mesh: FractalMesh, values: &[f64]) -> Result<Self> {
        Self::new(mesh, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mesh
            .cells
            .iter()
            .zip(&self.coefficients)
            .map(|(c, v)| c.measure * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Cell averages of `f` computed with sub-cells of diameter `<= h_q`
/// (relative to each cell's own diameter when `h_q` is larger).
pub fn l2_project<F>(model: &AttractorModel, mesh: &FractalMesh, f: F, h_q: f64) -> PiecewiseConstant
where
    F: Fn(&Point) -> Complex64,
{
    let coefficients = mesh
        .cells
        .iter()
        .map(|c| integrate_on_cell(model, c, &f, h_q.min(c.diameter)) * (1.0 / c.measure))
        .collect();
    PiecewiseConstant {
        mesh: mesh.clone(),
        coefficients,
    }
}

pub fn l2_project_real<F>(model: &AttractorModel, mesh: &FractalMesh, f: F, h_q: f64) -> PiecewiseConstant
where
    F: Fn(&Point) -> f64,
{
    l2_project(model, mesh, |p| Complex64::new(f(p), 0.0), h_q)
}

/// `‖f − q‖_{L²(Γ)}` with the quadrature of [`l2_project`].
pub fn l2_error<F>(model: &AttractorModel, q: &PiecewiseConstant, f: F, h_q: f64) -> f64
where
    F: Fn(&Point) -> Complex64,
{
    q.mesh
        .cells
        .iter()
        .zip(&q.coefficients)
        .map(|(c, &v)| integrate_on_cell(model, c, |p| (f(p) - v).norm_sqr(), h_q.min(c.diameter)))
        .sum::<f64>()
        .sqrt()
}

/// `‖f‖_{L²(Γ)}` by the same composite rule on the root.
pub fn l2_norm_of<F>(model: &AttractorModel, f: F, h_q: f64) -> f64
where
    F: Fn(&Point) -> Complex64,
{
    let root = crate::ifs::Cell::root(model);
    integrate_on_cell(model, &root, |p| f(p).norm_sqr(), h_q).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{generate_diameter_mesh, generate_level_mesh, library};
    use proptest::prelude::*;

    fn re(f: impl Fn(&Point) -> f64) -> impl Fn(&Point) -> Complex64 {
        move |p| Complex64::new(f(p), 0.0)
    }

    #[test]
    fn constants_are_reproduced() {
        let model = AttractorModel::new(library::koch_snowflake()).unwrap();
        let mesh = generate_diameter_mesh(&model, model.h0() / 4.0).unwrap();
        let q = l2_project_real(&model, &mesh, |_| 3.0, 1e-2);
        assert!(q.coefficients.iter().all(|c| (c.re - 3.0).abs() < 1e-12 && c.im == 0.0));
        assert!(l2_error(&model, &q, re(|_| 3.0), 1e-2) < 1e-12);
    }

    #[test]
    fn interval_identity_error() {
        // ∫_0^h (x − h/2)² dx = h³/12 on each of 1/h cells
        let model = AttractorModel::new(library::unit_interval()).unwrap();
        for level in 2..6 {
            let mesh = generate_level_mesh(&model, level);
            let h = 0.5f64.powi(level as i32);
            let q = l2_project_real(&model, &mesh, |p| p.x, h);
            let e = l2_error(&model, &q, re(|p| p.x), h / 64.0);
            let exact = h / (2.0 * 3f64.sqrt());
            assert!((e - exact).abs() < 1e-3 * exact, "{e} vs {exact}");
        }
    }

    #[test]
    fn idempotent() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let mesh = generate_level_mesh(&model, 2);
        let vals: Vec<f64> = (0..mesh.len()).map(|i| (i as f64).sin()).collect();
        let q = PiecewiseConstant::from_real(mesh.clone(), &vals).unwrap();
        let lookup = |p: &Point| {
            let i = mesh
                .cells
                .iter()
                .position(|c| (c.barycenter - p).amax() <= 0.125 + 1e-12)
                .unwrap();
            q.coefficients[i]
        };
        let qq = l2_project(&model, &mesh, lookup, 0.01);
        for (a, b) in q.coefficients.iter().zip(&qq.coefficients) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(PiecewiseConstant::from_real(mesh, &[1.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn best_approximation(a in -2.0f64..2.0, b in -2.0f64..2.0, shift in prop::collection::vec(-0.3f64..0.3, 16)) {
            let model = AttractorModel::new(library::unit_square()).unwrap();
            let mesh = generate_level_mesh(&model, 2);
            let f = move |p: &Point| Complex64::new((a * p.x).sin() + b * p.y * p.y, 0.0);
            let q = l2_project(&model, &mesh, f, 0.02);
            let e = l2_error(&model, &q, f, 0.02);
            let other = PiecewiseConstant::new(
                mesh.clone(),
                q.coefficients.iter().zip(&shift).map(|(c, s)| c + s).collect(),
            ).unwrap();
            prop_assert!(e <= l2_error(&model, &other, f, 0.02) + 1e-12);
        }
    }
}
