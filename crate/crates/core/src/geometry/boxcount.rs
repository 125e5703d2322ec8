use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::raster::{PixelClass, RasterImage};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::ifs::Point;

/// Residual above which a box-counting fit is reported as unstable.
pub const UNSTABLE_RESIDUAL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    /// Box sizes, decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Slope of `log count` against `log(1/scale)`.
    pub slope: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    pub unstable: bool,
}

/// Box-counting dimension of a point set at the given box sizes. Boxes are
/// anchored at `anchor`.
pub fn box_counting_dimension(points: &[Point], anchor: Point, scales: &[f64]) -> Result<DimensionFit> {
    if points.is_empty() {
        return Err(Error::invalid("points", "empty set has no box dimension"));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.total_cmp(a));
    scales.dedup();
    if scales.len() < 4 {
        return Err(Error::invalid("scales", "need at least 4 distinct scales"));
    }
    if scales.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::invalid("scales", "box sizes must be positive"));
    }
    if scales[0] / scales[scales.len() - 1] < 4.0 * (1.0 - 1e-12) {
        return Err(Error::invalid("scales", "scales must span at least two octaves"));
    }
    let counts: Vec<usize> = scales
        .iter()
        .map(|&s| {
            points
                .iter()
                .map(|p| {
                    (
                        ((p.x - anchor.x) / s).floor() as i64,
                        ((p.y - anchor.y) / s).floor() as i64,
                    )
                })
                .collect::<HashSet<_>>()
                .len()
        })
        .collect();
    let lx: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ly: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = fit_line(&lx, &ly);
    Ok(DimensionFit {
        scales,
        counts,
        slope: fit.slope,
        residual: fit.residual,
        unstable: fit.residual > UNSTABLE_RESIDUAL,
    })
}

/// Box dimension of the Boundary pixels of a raster. Box sizes are given in
/// absolute units and should be several pixels wide.
pub fn boundary_box_dimension(img: &RasterImage, scales: &[f64]) -> Result<DimensionFit> {
    let pts: Vec<Point> = img
        .pixels_of(PixelClass::Boundary)
        .into_iter()
        .map(|(ix, iy)| img.center(ix, iy))
        .collect();
    box_counting_dimension(&pts, img.origin, scales)
}

/// Dyadic box sizes `2^-lo ..= 2^-hi`.
pub fn dyadic_scales(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(-j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::raster::rasterize_attractor;
    use crate::ifs::{library, AttractorModel};

    #[test]
    fn segment_has_dimension_one() {
        let pts: Vec<Point> = (0..4096).map(|i| Point::new(i as f64 / 4096.0, 0.3)).collect();
        let fit = box_counting_dimension(&pts, Point::zeros(), &dyadic_scales(2, 8)).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-2, "{fit:?}");
        assert!(fit.counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(box_counting_dimension(&[], Point::zeros(), &dyadic_scales(2, 8)).is_err());
        let p = [Point::zeros()];
        assert!(box_counting_dimension(&p, Point::zeros(), &[0.5, 0.4, 0.3, 0.2]).is_err());
        assert!(box_counting_dimension(&p, Point::zeros(), &[0.5, 0.25]).is_err());
    }

    #[test]
    fn square_boundary() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let img = rasterize_attractor(&model, 2f64.powi(-10)).unwrap();
        let fit = boundary_box_dimension(&img, &dyadic_scales(3, 7)).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "{fit:?}");
    }
}
