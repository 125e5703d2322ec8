//! Dense LU solve of the Galerkin system.

use faer::prelude::*;
use faer::Mat;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assemble::GalerkinSystem;
use crate::approx::PiecewiseConstant;
use crate::error::{Error, Result};
use crate::ifs::FractalMesh;
use crate::kernels::HelmholtzKernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySolution {
    pub mesh: FractalMesh,
    pub kernel: HelmholtzKernel,
    /// Coefficients `c` in the normalized basis.
    pub coefficients: Vec<Complex64>,
    /// `c_i |Ω_i|^{-1/2}`, the value of `φ_h` on each cell.
    pub density: Vec<Complex64>,
    /// `‖A c − b‖ / ‖b‖`.
    pub residual: f64,
    pub max_entry_error: f64,
}

impl DensitySolution {
    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn as_piecewise_constant(&self) -> PiecewiseConstant {
        PiecewiseConstant {
            mesh: self.mesh.clone(),
            coefficients: self.density.clone(),
        }
    }

    /// `Σ |φ_i| |Ω_i|`.
    pub fn l1_norm(&self) -> f64 {
        self.density.iter().zip(&self.mesh.cells).map(|(d, c)| d.norm() * c.measure).sum()
    }
}

/// Partial-pivoting LU; the residual is recomputed from the stored matrix.
pub fn solve(system: &GalerkinSystem) -> Result<DensitySolution> {
    let n = system.len();
    if n == 0 {
        return Err(Error::invalid("system", "empty mesh"));
    }
    let a = Mat::<c64>::from_fn(n, n, |i, j| system.matrix[(i, j)]);
    let b = Mat::<c64>::from_fn(n, 1, |i, _| system.rhs[i]);
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let d = u[(i, i)].norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(lo > hi * 1e-15) {
        return Err(Error::Numerical(format!(
            "Galerkin matrix is singular to working precision (pivot ratio {:.3e})",
            lo / hi
        )));
    }
    let x = lu.solve(&b);
    let c = DVector::from_iterator(n, (0..n).map(|i| x[(i, 0)]));
    if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numerical("non-finite solution".into()));
    }
    let r = &system.matrix * &c - &system.rhs;
    let residual = r.norm() / system.rhs.norm().max(f64::MIN_POSITIVE);
    let density = c
        .iter()
        .zip(&system.measures)
        .map(|(v, m)| v / m.sqrt())
        .collect();
    Ok(DensitySolution {
        mesh: system.mesh.clone(),
        kernel: system.kernel,
        coefficients: c.iter().copied().collect(),
        density,
        residual,
        max_entry_error: system.max_entry_error(),
    })
}
