use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the screen plane. One-dimensional attractors live on the first
/// axis with the second coordinate held at zero.
pub type Point = Vector2<f64>;

const ORTHO_TOL: f64 = 1e-12;

/// A contracting similarity `x -> rho * Q x + delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMap {
    pub rho: f64,
    pub orthogonal: Matrix2<f64>,
    pub translation: Point,
}

impl SimilarityMap {
    pub fn new(rho: f64, orthogonal: Matrix2<f64>, translation: Point) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid("rho", format!("{rho} is not in (0,1)")));
        }
        let defect = (orthogonal * orthogonal.transpose() - Matrix2::identity()).abs().max();
        if defect > ORTHO_TOL {
            return Err(Error::invalid(
                "orthogonal",
                format!("Q Q^T deviates from identity by {defect:e}"),
            ));
        }
        Ok(Self {
            rho,
            orthogonal,
            translation,
        })
    }

    /// Scaling plus translation, no rotation.
    pub fn homothety(rho: f64, translation: Point) -> Result<Self> {
        Self::new(rho, Matrix2::identity(), translation)
    }

    /// Planar map given by rotation angle (degrees) and an optional reflection
    /// across the first axis applied before the rotation.
    pub fn planar(rho: f64, rotation_deg: f64, reflect: bool, translation: Point) -> Result<Self> {
        Self::new(rho, rotation_matrix(rotation_deg, reflect), translation)
    }

    /// One-dimensional map `x -> rho * sign * x + delta`.
    pub fn linear_1d(rho: f64, reflect: bool, delta: f64) -> Result<Self> {
        let sign = if reflect { -1.0 } else { 1.0 };
        Self::new(
            rho,
            Matrix2::new(sign, 0.0, 0.0, 1.0),
            Point::new(delta, 0.0),
        )
    }

    pub fn identity() -> Self {
        Self {
            rho: 1.0,
            orthogonal: Matrix2::identity(),
            translation: Point::zeros(),
        }
    }

    #[inline]
    pub fn apply(&self, x: &Point) -> Point {
        self.orthogonal * x * self.rho + self.translation
    }

    /// `self ∘ inner`.
    #[inline]
    pub fn compose(&self, inner: &SimilarityMap) -> SimilarityMap {
        SimilarityMap {
            rho: self.rho * inner.rho,
            orthogonal: self.orthogonal * inner.orthogonal,
            translation: self.apply(&inner.translation),
        }
    }

    pub fn inverse(&self) -> SimilarityMap {
        let qt = self.orthogonal.transpose();
        SimilarityMap {
            rho: 1.0 / self.rho,
            orthogonal: qt,
            translation: -(qt * self.translation) / self.rho,
        }
    }

    /// Unique fixed point, `(I - rho Q)^{-1} delta`.
    pub fn fixed_point(&self) -> Point {
        let a = Matrix2::identity() - self.orthogonal * self.rho;
        a.lu().solve(&self.translation).unwrap_or_else(Point::zeros)
    }

    /// Rotation angle in degrees and reflection flag of the orthogonal part.
    pub fn angle_and_reflection(&self) -> (f64, bool) {
        let q = &self.orthogonal;
        let reflect = q.determinant() < 0.0;
        // Q = R(theta) * diag(1, -1) when reflected
        let angle = q[(1, 0)].atan2(q[(0, 0)]).to_degrees();
        (angle, reflect)
    }
}

pub fn rotation_matrix(deg: f64, reflect: bool) -> Matrix2<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let (s, c) = (snap(s), snap(c));
    let rot = Matrix2::new(c, -s, s, c);
    if reflect {
        rot * Matrix2::new(1.0, 0.0, 0.0, -1.0)
    } else {
        rot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_ratio_and_matrix() {
        assert!(SimilarityMap::homothety(1.2, Point::zeros()).is_err());
        assert!(SimilarityMap::homothety(0.0, Point::zeros()).is_err());
        let skew = Matrix2::new(1.0, 0.1, 0.0, 1.0);
        assert!(SimilarityMap::new(0.5, skew, Point::zeros()).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a = SimilarityMap::planar(0.5, 30.0, false, Point::new(1.0, 2.0)).unwrap();
        let b = SimilarityMap::planar(0.25, -45.0, true, Point::new(-0.5, 0.3)).unwrap();
        let x = Point::new(0.7, -1.1);
        let ab = a.compose(&b);
        assert!((ab.apply(&x) - a.apply(&b.apply(&x))).norm() < 1e-14);
        let back = a.inverse().apply(&a.apply(&x));
        assert!((back - x).norm() < 1e-14);
        let fp = b.fixed_point();
        assert!((b.apply(&fp) - fp).norm() < 1e-14);
    }

    #[test]
    fn angle_roundtrip() {
        let m = SimilarityMap::planar(0.5, 120.0, true, Point::zeros()).unwrap();
        let (deg, refl) = m.angle_and_reflection();
        assert!((deg - 120.0).abs() < 1e-12);
        assert!(refl);
    }

    proptest! {
        #[test]
        fn distances_scale_by_rho(
            rho in 0.01f64..0.99, deg in -180.0f64..180.0, reflect: bool,
            tx in -3.0f64..3.0, ty in -3.0f64..3.0,
            x0 in -5.0f64..5.0, x1 in -5.0f64..5.0, y0 in -5.0f64..5.0, y1 in -5.0f64..5.0,
        ) {
            let s = SimilarityMap::planar(rho, deg, reflect, Point::new(tx, ty)).unwrap();
            let x = Point::new(x0, x1);
            let y = Point::new(y0, y1);
            let lhs = (s.apply(&x) - s.apply(&y)).norm();
            let rhs = rho * (x - y).norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }
}
