//! Scattered field `u = −Sφ_h` off the screen.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solve::DensitySolution;
use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, Point, SimilarityMap};
use crate::kernels::phi_points;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FieldRule {
    /// Subdivide each cell until sub-cells have diameter `<= sigma ·
    /// distance to x`, down to `max_depth` levels below the cell.
    Adaptive { sigma: f64, max_depth: usize },
    /// The same sub-cells of relative size `h_rel` for every point, which
    /// makes `u` an exact finite sum of fundamental solutions.
    Fixed { h_rel: f64 },
}

impl Default for FieldRule {
    fn default() -> Self {
        FieldRule::Adaptive { sigma: 0.25, max_depth: 24 }
    }
}

fn embed(n: usize, p: &Point) -> [f64; 3] {
    if n == 2 {
        [p.x, p.y, 0.0]
    } else {
        [p.x, 0.0, 0.0]
    }
}

/// Height of `x` above the screen plane.
fn height(n: usize, x: &[f64; 3]) -> f64 {
    if n == 2 {
        x[2].abs()
    } else {
        x[1].abs()
    }
}

fn distance(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

/// `u(x)` for `x` in `R^{n+1}` given as `[x1, x2, x3]`; for `n = 1` the
/// normal coordinate is `x2` and `x3` is ignored.
pub fn evaluate_field(model: &AttractorModel, sol: &DensitySolution, x: &[f64; 3], rule: FieldRule) -> Result<Complex64> {
    let n = model.n();
    let mut x = *x;
    if n == 1 {
        x[2] = 0.0;
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("x", "non-finite evaluation point"));
    }
    if height(n, &x) == 0.0 {
        return Err(Error::invalid("x", format!("{x:?} lies on the screen plane")));
    }
    let kernel = &sol.kernel;
    let h0 = model.h0();
    let nn = n as i32;
    let mu0 = model.measure();
    let potential = |map: &SimilarityMap| -> Complex64 {
        let mut acc = Complex64::default();
        match rule {
            FieldRule::Fixed { h_rel } => {
                let stop = h_rel * map.rho * h0;
                let mut stack = vec![*map];
                while let Some(m) = stack.pop() {
                    if m.rho * h0 <= stop * (1.0 + 1e-12) {
                        let y = embed(n, &m.apply(&model.barycenter));
                        acc += phi_points(kernel, &x, &y) * (m.rho.powi(nn) * mu0);
                    } else {
                        stack.extend(model.ifs.maps.iter().map(|s| m.compose(s)));
                    }
                }
            }
            FieldRule::Adaptive { sigma, max_depth } => {
                let mut stack = vec![(*map, 0usize)];
                while let Some((m, depth)) = stack.pop() {
                    let y = embed(n, &m.apply(&model.barycenter));
                    let ball = model.bounding_ball.mapped(&m);
                    let d = (distance(&x, &embed(n, &ball.center)) - ball.radius).max(height(n, &x));
                    if m.rho * h0 <= sigma * d || depth >= max_depth {
                        acc += phi_points(kernel, &x, &y) * (m.rho.powi(nn) * mu0);
                    } else {
                        stack.extend(model.ifs.maps.iter().map(|s| (m.compose(s), depth + 1)));
                    }
                }
            }
        }
        acc
    };
    let u: Complex64 = sol
        .mesh
        .cells
        .iter()
        .zip(&sol.density)
        .map(|(c, d)| d * potential(&c.map))
        .sum();
    Ok(-u)
}

pub fn evaluate_field_many(
    model: &AttractorModel,
    sol: &DensitySolution,
    points: &[[f64; 3]],
    rule: FieldRule,
) -> Result<Vec<Complex64>> {
    points.par_iter().map(|x| evaluate_field(model, sol, x, rule)).collect()
}
