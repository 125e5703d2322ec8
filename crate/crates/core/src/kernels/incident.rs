use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::helmholtz::Wavenumber;
use crate::error::{Error, Result};
use crate::ifs::Point;

/// `u^i(x) = exp(i k ϑ·x)` in `R^{n+1}`; the screen lies in `x_{n+1} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentPlaneWave {
    pub k: f64,
    /// Unit direction. For `n = 1` the third component must be zero and the
    /// second is normal to the screen line.
    pub direction: Vector3<f64>,
    pub n: usize,
}

impl IncidentPlaneWave {
    pub fn new(k: Wavenumber, direction: Vector3<f64>, n: usize) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > 1e-14 {
            return Err(Error::invalid(
                "direction",
                format!("|theta| = {} is not 1", direction.norm()),
            ));
        }
        if n == 1 && direction.z != 0.0 {
            return Err(Error::invalid("direction", "n = 1 waves propagate in the (x1, x2) plane"));
        }
        if !(1..=2).contains(&n) {
            return Err(Error::invalid("n", format!("{n} is not 1 or 2")));
        }
        Ok(Self { k: k.get(), direction, n })
    }

    /// Normal incidence from above: `ϑ = (0, …, 0, −1)`.
    pub fn normal(k: Wavenumber, n: usize) -> Result<Self> {
        let d = if n == 1 { Vector3::new(0.0, -1.0, 0.0) } else { Vector3::new(0.0, 0.0, -1.0) };
        Self::new(k, d, n)
    }

    /// Tangential part `ϑ̃` of the direction.
    pub fn tangential(&self) -> Point {
        if self.n == 1 {
            Point::new(self.direction.x, 0.0)
        } else {
            Point::new(self.direction.x, self.direction.y)
        }
    }

    /// `u^i` at a point of `R^{n+1}` given as `[x1, x2, x3]`; for `n = 1`
    /// the normal coordinate is `x2`.
    pub fn value(&self, x: &[f64; 3]) -> Complex64 {
        let d = &self.direction;
        let phase = self.k * (d.x * x[0] + d.y * x[1] + d.z * x[2]);
        Complex64::new(phase.cos(), phase.sin())
    }

    /// `u^i` on the screen plane.
    #[inline]
    pub fn on_plane(&self, x: &Point) -> Complex64 {
        let phase = self.k * self.tangential().dot(x);
        Complex64::new(phase.cos(), phase.sin())
    }
}

/// Dirichlet datum `g = −u^i` restricted to the screen plane.
pub fn incident_trace(wave: &IncidentPlaneWave, x: &Point) -> Complex64 {
    -wave.on_plane(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normal_incidence_is_minus_one() {
        let w = IncidentPlaneWave::normal(Wavenumber::new(5.0).unwrap(), 2).unwrap();
        for p in [Point::new(0.3, -2.0), Point::new(7.0, 1.0)] {
            assert_eq!(incident_trace(&w, &p), Complex64::new(-1.0, 0.0));
        }
    }

    #[test]
    fn grazing_phase() {
        let w = IncidentPlaneWave::new(Wavenumber::new(PI).unwrap(), Vector3::new(1.0, 0.0, 0.0), 2).unwrap();
        let g = incident_trace(&w, &Point::new(1.0, 0.0));
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unimodular_and_validated() {
        let d = Vector3::new(0.6, 0.0, -0.8);
        let w = IncidentPlaneWave::new(Wavenumber::new(3.0).unwrap(), d, 2).unwrap();
        for i in 0..20 {
            let p = Point::new(i as f64 * 0.37, -(i as f64) * 0.11);
            assert!((incident_trace(&w, &p).norm() - 1.0).abs() < 1e-15);
        }
        assert!(IncidentPlaneWave::new(Wavenumber::new(3.0).unwrap(), Vector3::new(1.0, 1.0, 0.0), 2).is_err());
    }
}
