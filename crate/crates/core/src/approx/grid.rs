//! Regular-grid representations of functions on `Γ` extended by zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::projection::PiecewiseConstant;
use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, Point, SimilarityMap};

const PADDING: f64 = 2.0;
const MAX_PIXELS: usize = 1 << 26;

/// Complex samples on a regular grid of spacing `g`; `ny == 1` when `n == 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub n: usize,
    pub origin: Point,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<Complex64>,
}

impl GridField {
    pub fn from_samples(n: usize, origin: Point, spacing: f64, nx: usize, ny: usize, data: Vec<Complex64>) -> Result<Self> {
        if !(n == 1 || n == 2) || (n == 1 && ny != 1) {
            return Err(Error::invalid("n", format!("grid of dimension {n} with ny = {ny}")));
        }
        if !(spacing > 0.0) || data.len() != nx * ny {
            return Err(Error::invalid("data", "sample count does not match the grid shape"));
        }
        Ok(Self { n, origin, spacing, nx, ny, data })
    }

    /// Zero field over the invariant ball of `model` with at least two
    /// pixels of padding per side; the origin is a multiple of `g`.
    pub fn covering(model: &AttractorModel, g: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::invalid("g", format!("{g} is not a positive spacing")));
        }
        let n = model.n();
        let b = &model.bounding_ball;
        let lo = |c: f64| ((c - b.radius) / g - PADDING).floor();
        let hi = |c: f64| ((c + b.radius) / g + PADDING).ceil();
        let (x0, x1) = (lo(b.center.x), hi(b.center.x));
        let nx = (x1 - x0) as usize;
        let (y0, ny) = if n == 2 {
            let (y0, y1) = (lo(b.center.y), hi(b.center.y));
            (y0, (y1 - y0) as usize)
        } else {
            (0.0, 1)
        };
        if nx.saturating_mul(ny) > MAX_PIXELS {
            return Err(Error::invalid("g", format!("{nx} x {ny} pixels exceed the grid cap")));
        }
        Ok(Self {
            n,
            origin: Point::new(x0 * g, y0 * g),
            spacing: g,
            nx,
            ny,
            data: vec![Complex64::default(); nx * ny],
        })
    }

    pub fn pixel_of(&self, p: &Point) -> Option<usize> {
        let i = ((p.x - self.origin.x) / self.spacing).floor();
        let j = if self.n == 2 {
            ((p.y - self.origin.y) / self.spacing).floor()
        } else {
            0.0
        };
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some(j as usize * self.nx + i as usize)
    }

    pub fn pixel_measure(&self) -> f64 {
        self.spacing.powi(self.n as i32)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.pixel_measure() * self.data.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn same_shape(&self, other: &GridField) -> bool {
        self.n == other.n
            && self.nx == other.nx
            && self.ny == other.ny
            && self.spacing == other.spacing
            && self.origin == other.origin
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        if !self.same_shape(other) {
            return Err(Error::invalid("grid", "fields live on different grids"));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scaled(&self, lambda: Complex64) -> GridField {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= lambda);
        out
    }

    /// Deposits the mass `value · |A(Γ)|` of a cell into pixels, descending
    /// into sub-cells until they are smaller than half a pixel.
    fn deposit<F: Fn(&Point) -> Complex64>(&mut self, model: &AttractorModel, map: &SimilarityMap, value: &F) {
        let n = model.n() as i32;
        let inv_pixel = 1.0 / self.pixel_measure();
        let stop = 0.5 * self.spacing;
        let mut stack = vec![*map];
        while let Some(m) = stack.pop() {
            if m.rho * model.h0() <= stop {
                let x = m.apply(&model.barycenter);
                if let Some(i) = self.pixel_of(&x) {
                    self.data[i] += value(&x) * (m.rho.powi(n) * model.measure() * inv_pixel);
                }
            } else {
                stack.extend(model.ifs.maps.iter().map(|s| m.compose(s)));
            }
        }
    }
}

/// Zero extension of `f|_Γ` sampled as pixel averages.
pub fn deposit_function<F>(model: &AttractorModel, g: f64, f: F) -> Result<GridField>
where
    F: Fn(&Point) -> Complex64,
{
    let mut field = GridField::covering(model, g)?;
    field.deposit(model, &SimilarityMap::identity(), &f);
    Ok(field)
}

/// Zero extension of a piecewise constant.
pub fn deposit_piecewise_constant(model: &AttractorModel, q: &PiecewiseConstant, g: f64) -> Result<GridField> {
    let mut field = GridField::covering(model, g)?;
    for (cell, &v) in q.mesh.cells.iter().zip(&q.coefficients) {
        field.deposit(model, &cell.map, &|_: &Point| v);
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::projection::l2_project_real;
    use crate::ifs::{generate_level_mesh, library};

    #[test]
    fn square_indicator() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let g = 1.0 / 64.0;
        let f = deposit_function(&model, g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let total: f64 = f.data.iter().map(|v| v.re).sum::<f64>() * f.pixel_measure();
        assert!((total - 1.0).abs() < 1e-12);
        // aligned pixels are exactly filled
        assert!(f.data.iter().all(|v| v.re == 0.0 || (v.re - 1.0).abs() < 1e-12));
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
        assert!(f.nx >= 64 + 4);
    }

    #[test]
    fn projection_of_constant_matches_function() {
        let model = AttractorModel::new(library::koch_snowflake()).unwrap();
        let mesh = generate_level_mesh(&model, 2);
        let g = 0.01;
        let q = l2_project_real(&model, &mesh, |_| 1.0, 0.1);
        let a = deposit_piecewise_constant(&model, &q, g).unwrap();
        let b = deposit_function(&model, g, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(a.sub(&b).unwrap().l2_norm() < 1e-10);
        assert!((b.l2_norm().powi(2) - model.measure()).abs() < 5e-2 * model.measure());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GridField::from_samples(1, Point::zeros(), 0.1, 4, 2, vec![Complex64::default(); 8]).is_err());
        assert!(GridField::from_samples(2, Point::zeros(), 0.1, 4, 2, vec![Complex64::default(); 7]).is_err());
    }
}
