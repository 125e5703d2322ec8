//! Built-in attractors.

use nalgebra::Matrix2;

use super::similarity::{Point, SimilarityMap};
use super::system::IteratedFunctionSystem;
use crate::error::{Error, Result};

fn homothety(rho: f64, x: f64, y: f64) -> SimilarityMap {
    SimilarityMap::homothety(rho, Point::new(x, y)).expect("library map")
}

/// `[0,1]^2` as four quadrants.
pub fn unit_square() -> IteratedFunctionSystem {
    let maps = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
        .iter()
        .map(|&(x, y)| homothety(0.5, x, y))
        .collect();
    IteratedFunctionSystem::new("unit_square", 2, maps, Some(1.0)).expect("library IFS")
}

/// `[0,1]^2 ∪ [1,2]^2`, two squares sharing the corner `(1,1)`.
///
/// Each unit square is the union of two half-size copies of the whole set,
/// one direct and one mirrored in the first coordinate.
pub fn two_touching_squares() -> IteratedFunctionSystem {
    let mirror = Matrix2::new(-1.0, 0.0, 0.0, 1.0);
    let m = |x: f64, y: f64| SimilarityMap::new(0.5, mirror, Point::new(x, y)).expect("library map");
    let maps = vec![
        homothety(0.5, 0.0, 0.0),
        m(1.0, 0.0),
        homothety(0.5, 1.0, 1.0),
        m(2.0, 1.0),
    ];
    IteratedFunctionSystem::new("two_touching_squares", 2, maps, Some(2.0)).expect("library IFS")
}

/// `[0,1]^2 ∪ [2,3]×[0,1]`: the product of the interval pair
/// `[0,1] ∪ [2,3]` (four maps of ratio 1/4) with `[0,1]` (four rows).
pub fn two_separated_squares() -> IteratedFunctionSystem {
    let mut maps = Vec::new();
    for x in [0.0, 0.25, 2.0, 2.25] {
        for j in 0..4 {
            maps.push(homothety(0.25, x, j as f64 / 4.0));
        }
    }
    IteratedFunctionSystem::new("two_separated_squares", 2, maps, Some(2.0)).expect("library IFS")
}

/// Product of the one-dimensional attractor with `alpha = 1/2` and `[0,1]`;
/// infinitely many components.
pub fn infinite_components() -> IteratedFunctionSystem {
    let mut maps = Vec::new();
    for m in 1..=4 {
        maps.push(homothety(0.25, 0.0, (m - 1) as f64 / 4.0));
    }
    for m in 5..=8 {
        maps.push(homothety(0.25, 0.5, (m - 5) as f64 / 4.0));
    }
    maps.push(homothety(0.5, 0.5, 0.0));
    maps.push(homothety(0.5, 0.5, 0.5));
    IteratedFunctionSystem::new("infinite_components", 2, maps, Some(2.0 / 3.0)).expect("library IFS")
}

/// `{0} ∪ ⋃_m [alpha^{2m+1}, alpha^{2m}]` as the attractor of
/// `alpha^2 x`, `(1-alpha) x + alpha`, `alpha(1-alpha) x + alpha`.
pub fn gamma_1d(alpha: f64) -> Result<IteratedFunctionSystem> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is not in (0,1)")));
    }
    let maps = vec![
        SimilarityMap::linear_1d(alpha * alpha, false, 0.0)?,
        SimilarityMap::linear_1d(1.0 - alpha, false, alpha)?,
        SimilarityMap::linear_1d(alpha * (1.0 - alpha), false, alpha)?,
    ];
    IteratedFunctionSystem::new(
        format!("gamma_1d(alpha={alpha})"),
        1,
        maps,
        Some(1.0 / (1.0 + alpha)),
    )
}

/// `[0,1]` as two halves.
pub fn unit_interval() -> IteratedFunctionSystem {
    let maps = vec![
        SimilarityMap::linear_1d(0.5, false, 0.0).expect("library map"),
        SimilarityMap::linear_1d(0.5, false, 0.5).expect("library map"),
    ];
    IteratedFunctionSystem::new("unit_interval", 1, maps, Some(1.0)).expect("library IFS")
}

/// Closed Koch snowflake with its six tips on the unit circle at
/// `90° + 60° j`, centered at the origin.
///
/// Seven maps: a central copy scaled by `1/sqrt(3)` and rotated by 30°, plus
/// six copies scaled by `1/3` centered at `2/3` of the way to each tip.
/// Area `6 sqrt(3) / 5`, diameter 2.
pub fn koch_snowflake() -> IteratedFunctionSystem {
    let mut maps = vec![SimilarityMap::planar(1.0 / 3f64.sqrt(), 30.0, false, Point::zeros())
        .expect("library map")];
    for j in 0..6 {
        let (s, c) = (90.0 + 60.0 * j as f64).to_radians().sin_cos();
        maps.push(homothety(1.0 / 3.0, 2.0 / 3.0 * c, 2.0 / 3.0 * s));
    }
    IteratedFunctionSystem::new("koch_snowflake", 2, maps, Some(6.0 * 3f64.sqrt() / 5.0))
        .expect("library IFS")
}

pub const LIBRARY_NAMES: &[&str] = &[
    "unit_square",
    "two_touching_squares",
    "two_separated_squares",
    "infinite_components",
    "gamma_1d",
    "unit_interval",
    "koch_snowflake",
];

/// Look up a library attractor; `gamma_1d` takes `alpha = 1/2`.
pub fn by_name(name: &str) -> Result<IteratedFunctionSystem> {
    Ok(match name {
        "unit_square" | "square" => unit_square(),
        "two_touching_squares" => two_touching_squares(),
        "two_separated_squares" => two_separated_squares(),
        "infinite_components" => infinite_components(),
        "gamma_1d" => gamma_1d(0.5)?,
        "unit_interval" | "interval" => unit_interval(),
        "koch_snowflake" | "snowflake" => koch_snowflake(),
        other => {
            return Err(Error::invalid(
                "attractor",
                format!("unknown library name {other:?}; known: {}", LIBRARY_NAMES.join(", ")),
            ))
        }
    })
}

pub fn all() -> Vec<IteratedFunctionSystem> {
    LIBRARY_NAMES.iter().map(|n| by_name(n).expect("library")).collect()
}
