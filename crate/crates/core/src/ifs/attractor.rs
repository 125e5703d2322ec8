use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::similarity::{Point, SimilarityMap};
use super::system::IteratedFunctionSystem;
use crate::error::{Error, Result};

/// Closed ball mapped into itself by every map of the IFS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// Image of the ball under a similarity.
    #[inline]
    pub fn mapped(&self, s: &SimilarityMap) -> Ball {
        Ball {
            center: s.apply(&self.center),
            radius: s.rho * self.radius,
        }
    }

    /// Gap between two balls (negative when they overlap).
    #[inline]
    pub fn gap(&self, other: &Ball) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }
}

/// A value with a certified or estimated error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounded {
    pub value: f64,
    /// Half-width of the interval containing the true value.
    pub bar: f64,
}

/// Attractor-level constants shared by meshes, quadrature and the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorModel {
    pub ifs: IteratedFunctionSystem,
    pub bounding_ball: Ball,
    /// `h0 = diam(Gamma)`; `bar` is half the certified gap.
    pub diameter: Bounded,
    pub total_measure: Bounded,
    pub barycenter: Point,
    /// Fixed points of the individual maps. These lie in the attractor.
    pub anchors: Vec<Point>,
}

/// Options for building an [`AttractorModel`].
#[derive(Debug, Clone, Copy)]
pub struct ModelOptions {
    /// Requested certified diameter gap relative to the ball radius.
    pub diameter_rel_tol: f64,
    /// Pixel size relative to `h0` for the raster measure fallback.
    pub measure_pixel_rel: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            diameter_rel_tol: 1e-9,
            measure_pixel_rel: 1.0 / 512.0,
        }
    }
}

impl AttractorModel {
    pub fn new(ifs: IteratedFunctionSystem) -> Result<Self> {
        Self::with_options(ifs, ModelOptions::default())
    }

    pub fn with_options(ifs: IteratedFunctionSystem, opts: ModelOptions) -> Result<Self> {
        ifs.require_n_attractor()?;
        let barycenter = attractor_barycenter(&ifs)?;
        let bounding_ball = invariant_bounding_ball(&ifs, barycenter);
        let anchors: Vec<Point> = ifs.maps.iter().map(|m| m.fixed_point()).collect();
        let diam = attractor_diameter(&ifs, &bounding_ball, &anchors, opts.diameter_rel_tol * bounding_ball.radius);
        let diameter = Bounded {
            value: 0.5 * (diam.lower + diam.upper),
            bar: 0.5 * (diam.upper - diam.lower),
        };
        let mut model = AttractorModel {
            ifs,
            bounding_ball,
            diameter,
            total_measure: Bounded { value: f64::NAN, bar: f64::INFINITY },
            barycenter,
            anchors,
        };
        model.total_measure = match model.ifs.declared_measure {
            Some(mu) => Bounded { value: mu, bar: 0.0 },
            None => {
                let est = crate::geometry::raster::raster_measure(
                    &model,
                    opts.measure_pixel_rel * model.h0(),
                )?;
                Bounded { value: est.value, bar: est.bar }
            }
        };
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.ifs.ambient_dim
    }

    pub fn h0(&self) -> f64 {
        self.diameter.value
    }

    pub fn measure(&self) -> f64 {
        self.total_measure.value
    }

    /// Copy of the model with the declared measure multiplied by `lambda`.
    pub fn with_scaled_measure(&self, lambda: f64) -> Self {
        let mut m = self.clone();
        m.total_measure.value *= lambda;
        m.total_measure.bar *= lambda;
        m.ifs.declared_measure = Some(m.total_measure.value);
        m
    }
}

/// Barycenter of the normalized self-similar measure with weights `rho_m^n`:
/// solves `x = sum_m w_m s_m(x)`.
pub fn attractor_barycenter(ifs: &IteratedFunctionSystem) -> Result<Point> {
    let w = ifs.weights();
    let mut a = Matrix2::identity();
    let mut b = Point::zeros();
    for (m, wm) in ifs.maps.iter().zip(&w) {
        a -= m.orthogonal * (wm * m.rho);
        b += m.translation * *wm;
    }
    if ifs.ambient_dim == 1 {
        // second axis carries no dynamics
        a[(1, 1)] = 1.0;
        b.y = 0.0;
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("barycenter system is singular".into()))?;
    let residual: Point = ifs
        .maps
        .iter()
        .zip(&w)
        .map(|(m, wm)| m.apply(&x) * *wm)
        .sum::<Point>()
        - x;
    if residual.norm() > 1e-12 * (1.0 + x.norm()) {
        return Err(Error::Numerical(format!(
            "barycenter residual {:e} is anomalous",
            residual.norm()
        )));
    }
    Ok(x)
}

/// Smallest radius `R` about `center` with `s_m(B) ⊆ B` for every map, by
/// the fixed-point iteration `R <- max_m (rho_m R + |s_m(c) - c|)`.
pub fn invariant_bounding_ball(ifs: &IteratedFunctionSystem, center: Point) -> Ball {
    let offsets: Vec<(f64, f64)> = ifs
        .maps
        .iter()
        .map(|m| (m.rho, (m.apply(&center) - center).norm()))
        .collect();
    let step = |r: f64| offsets.iter().map(|(rho, d)| rho * r + d).fold(0.0, f64::max);
    let mut r = 0.0;
    for _ in 0..10_000 {
        let next = step(r);
        if (next - r).abs() <= 1e-15 * next.max(1e-300) {
            r = next;
            break;
        }
        r = next;
    }
    // The iteration approaches the invariant radius from below; close the
    // remaining gap so the containment holds in floating point.
    while offsets.iter().any(|(rho, d)| rho * r + d > r) {
        r *= 1.0 + 4.0 * f64::EPSILON;
        if r == 0.0 {
            break;
        }
    }
    Ball { center, radius: r }
}

/// Certified diameter bracket produced by [`attractor_diameter`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiameterBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
}

/// Branch-and-bound over pairs of cells.
///
/// The lower bound is the largest distance between points known to lie in
/// the attractor (images of the maps' fixed points); the upper bound is the
/// largest `|c_a - c_b| + r_a + r_b` over cell pairs not yet excluded.
pub fn attractor_diameter(
    ifs: &IteratedFunctionSystem,
    ball: &Ball,
    anchors: &[Point],
    tol: f64,
) -> DiameterBracket {
    const DEPTH_CAP: usize = 60;
    const FRONTIER_CAP: usize = 400_000;

    let root = SimilarityMap::identity();
    let mut lower: f64 = 0.0;
    for a in anchors {
        for b in anchors {
            lower = lower.max((a - b).norm());
        }
    }
    let bound = |a: &SimilarityMap, b: &SimilarityMap| {
        let ba = ball.mapped(a);
        let bb = ball.mapped(b);
        (ba.center - bb.center).norm() + ba.radius + bb.radius
    };
    // (map_a, map_b, same cell)
    let mut frontier = vec![(root, root, true)];
    let mut frozen_upper: f64 = 0.0;
    let mut depth = 0;
    while !frontier.is_empty() && depth < DEPTH_CAP {
        let mut next = Vec::new();
        for (a, b, same) in &frontier {
            let ub = bound(a, b);
            if ub <= lower {
                continue;
            }
            if ub <= lower + tol {
                frozen_upper = frozen_upper.max(ub);
                continue;
            }
            let split_a = a.rho >= b.rho;
            let split_b = b.rho >= a.rho;
            let kids_a: Vec<SimilarityMap> = if split_a {
                ifs.maps.iter().map(|m| a.compose(m)).collect()
            } else {
                vec![*a]
            };
            let kids_b: Vec<SimilarityMap> = if split_b {
                ifs.maps.iter().map(|m| b.compose(m)).collect()
            } else {
                vec![*b]
            };
            for (i, ka) in kids_a.iter().enumerate() {
                for (j, kb) in kids_b.iter().enumerate() {
                    if *same && j < i {
                        continue;
                    }
                    for pa in anchors {
                        let xa = ka.apply(pa);
                        for pb in anchors {
                            lower = lower.max((xa - kb.apply(pb)).norm());
                        }
                    }
                    next.push((*ka, *kb, *same && i == j));
                }
            }
        }
        depth += 1;
        if next.len() > FRONTIER_CAP {
            let upper = next
                .iter()
                .map(|(a, b, _)| bound(a, b))
                .fold(frozen_upper, f64::max)
                .max(lower);
            return DiameterBracket { lower, upper, depth };
        }
        frontier = next;
    }
    let upper = frontier
        .iter()
        .map(|(a, b, _)| bound(a, b))
        .filter(|&u| u > lower)
        .fold(frozen_upper, f64::max)
        .max(lower);
    DiameterBracket { lower, upper, depth }
}
