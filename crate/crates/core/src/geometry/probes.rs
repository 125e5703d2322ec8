//! Monte-Carlo and raster probes of porosity, the open set condition, and
//! boundary-distance integrals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::raster::{PixelClass, RasterImage};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::ifs::{Ball, IteratedFunctionSystem, Point};

/// Slope thresholds for the trend verdict.
pub const BOUNDED_SLOPE: f64 = 0.1;
pub const GROWING_SLOPE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

impl Verdict {
    pub fn from_slope(slope: f64) -> Self {
        if slope < BOUNDED_SLOPE {
            Verdict::Bounded
        } else if slope > GROWING_SLOPE {
            Verdict::Growing
        } else {
            Verdict::Inconclusive
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// ---------------------------------------------------------------- porosity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PorosityTrial {
    pub x: [f64; 2],
    pub r: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PorosityReport {
    pub probe: String,
    pub trials: Vec<PorosityTrial>,
    /// Minimum over trials: a conservative estimate of the porosity constant.
    pub eta_min: f64,
    pub pixel_size: f64,
    pub r_min: f64,
    /// Radii below 8 pixels were requested.
    pub coarse: bool,
    /// No empty ball was found in some trial.
    pub failed: bool,
}

/// For random `x` in `sample_box` and log-uniform `r` in `[r_min, r_max]`,
/// finds the largest `eta` such that a ball `B(y, eta r) ⊆ B(x, r)` misses
/// the Boundary pixels. Clearance is measured from pixel centers and
/// reduced by half a pixel diagonal.
pub fn porosity_probe(
    img: &RasterImage,
    sample_box: (Point, Point),
    trials: usize,
    r_range: (f64, f64),
    seed: u64,
) -> Result<PorosityReport> {
    let (r_min, r_max) = r_range;
    if !(r_min > 0.0 && r_min <= r_max && r_max <= 1.0) {
        return Err(Error::invalid("r_range", "need 0 < r_min <= r_max <= 1"));
    }
    let g = img.pixel_size;
    let dist = img.distance_to_boundary();
    let slack = 0.5 * g * std::f64::consts::SQRT_2;
    let (lo, hi) = sample_box;
    let mut rng = rng_for(seed, 0);
    let draws: Vec<(Point, f64)> = (0..trials)
        .map(|_| {
            let x = Point::new(
                rng.gen_range(lo.x..=hi.x),
                if img.dim == 1 { 0.0 } else { rng.gen_range(lo.y..=hi.y) },
            );
            let r = (r_min.ln() + rng.gen::<f64>() * (r_max / r_min).ln()).exp();
            (x, r)
        })
        .collect();
    let results: Vec<PorosityTrial> = draws
        .par_iter()
        .map(|&(x, r)| {
            let mut best: f64 = 0.0;
            let span = |c: f64, o: f64, n: usize| {
                let a = (((c - r - o) / g).floor().max(0.0)) as usize;
                let b = ((((c + r - o) / g).floor()) as i64).clamp(0, n as i64 - 1) as usize;
                (a, b)
            };
            let (x0, x1) = span(x.x, img.origin.x, img.nx);
            let (y0, y1) = if img.dim == 1 { (0, 0) } else { span(x.y, img.origin.y, img.ny) };
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    let y = img.center(ix, iy);
                    let room = r - (y - x).norm();
                    if room <= best {
                        continue;
                    }
                    let clear = dist[img.idx(ix, iy)] - slack;
                    best = best.max(room.min(clear));
                }
            }
            PorosityTrial {
                x: [x.x, x.y],
                r,
                eta: best / r,
            }
        })
        .collect();
    let eta_min = results.iter().map(|t| t.eta).fold(f64::INFINITY, f64::min);
    Ok(PorosityReport {
        probe: "porosity".into(),
        eta_min,
        pixel_size: g,
        r_min,
        coarse: r_min < 8.0 * g,
        failed: !(eta_min > 0.0),
        trials: results,
    })
}

// ---------------------------------------------------------------- OSC

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub m: usize,
    pub m_prime: usize,
    pub area: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscReport {
    pub probe: String,
    /// Per map, fraction of sampled Inside pixels whose image leaves the cover.
    pub escape_fraction: Vec<f64>,
    pub escape_tolerance: f64,
    pub overlaps: Vec<OverlapEntry>,
    pub max_overlap: f64,
    pub pixel_size: f64,
    pub holds: bool,
}

/// Checks `s_m(Γ°) ⊆ Γ°` and pairwise disjointness of the images on a raster
/// of the attractor of `ifs`.
pub fn osc_and_overlap_probe(
    ifs: &IteratedFunctionSystem,
    img: &RasterImage,
    samples: usize,
    seed: u64,
) -> OscReport {
    let inside = img.pixels_of(PixelClass::Inside);
    let n_boundary = img.count(PixelClass::Boundary);
    let escape_tolerance = if inside.is_empty() {
        1.0
    } else {
        n_boundary as f64 / inside.len() as f64
    };
    let mut rng = rng_for(seed, 1);
    let picks: Vec<(usize, usize)> = if inside.len() <= samples {
        inside.clone()
    } else {
        (0..samples).map(|_| inside[rng.gen_range(0..inside.len())]).collect()
    };
    let escape_fraction: Vec<f64> = ifs
        .maps
        .iter()
        .map(|s| {
            if picks.is_empty() {
                return 0.0;
            }
            let out = picks
                .iter()
                .filter(|&&(ix, iy)| {
                    let q = s.apply(&img.center(ix, iy));
                    !matches!(img.locate(&q), Some((jx, jy)) if img.is_touched(jx, jy))
                })
                .count();
            out as f64 / picks.len() as f64
        })
        .collect();

    // membership of every pixel center in s_m(Γ°)
    let members: Vec<Vec<bool>> = ifs
        .maps
        .par_iter()
        .map(|s| {
            let inv = s.inverse();
            (0..img.nx * img.ny)
                .map(|i| {
                    let p = inv.apply(&img.center(i % img.nx, i / img.nx));
                    matches!(img.locate(&p), Some((jx, jy)) if img.class(jx, jy) == PixelClass::Inside)
                })
                .collect()
        })
        .collect();
    let pm = img.pixel_measure();
    let mut overlaps = Vec::new();
    for a in 0..ifs.len() {
        for b in a + 1..ifs.len() {
            let both = members[a].iter().zip(&members[b]).filter(|(x, y)| **x && **y).count();
            let rho = ifs.maps[a].rho.max(ifs.maps[b].rho);
            overlaps.push(OverlapEntry {
                m: a,
                m_prime: b,
                area: both as f64 * pm,
                tolerance: rho * n_boundary as f64 * pm,
            });
        }
    }
    let max_overlap = overlaps.iter().map(|o| o.area).fold(0.0, f64::max);
    let holds = escape_fraction.iter().all(|&f| f <= escape_tolerance)
        && overlaps.iter().all(|o| o.area <= o.tolerance);
    OscReport {
        probe: "osc".into(),
        escape_fraction,
        escape_tolerance,
        overlaps,
        max_overlap,
        pixel_size: img.pixel_size,
        holds,
    }
}

// ---------------------------------------------------------------- distance integrals

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub r: f64,
    pub max_estimate: f64,
    pub mean_estimate: f64,
    pub max_stderr: f64,
    /// Fraction of samples that fell in the zero-distance pixel band.
    pub excluded_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub probe: String,
    pub params: serde_json::Value,
    pub per_scale: Vec<ScaleRow>,
    /// Slope of `log max_estimate` against `log(1/r)`.
    pub slope: f64,
    pub verdict: Verdict,
    pub tolerances: serde_json::Value,
}

/// Options shared by the D^t and Aikawa probes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntegralProbeOptions {
    pub centers: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for IntegralProbeOptions {
    fn default() -> Self {
        Self {
            centers: 32,
            samples: 100_000,
            seed: 0,
        }
    }
}

/// `r^a ∫_{B(x,r)} dist(y, ∂)^{-b} dy` at Boundary-pixel centers `x`,
/// excluding the zero-distance band.
fn distance_integral(
    img: &RasterImage,
    a: f64,
    b: f64,
    radii: &[f64],
    opts: &IntegralProbeOptions,
) -> Result<Vec<ScaleRow>> {
    let boundary = img.pixels_of(PixelClass::Boundary);
    if boundary.is_empty() {
        return Err(Error::invalid("raster", "no boundary pixels"));
    }
    let dist = img.distance_to_boundary();
    let mut rng = rng_for(opts.seed, 2);
    let centers: Vec<Point> = (0..opts.centers)
        .map(|_| {
            let (ix, iy) = boundary[rng.gen_range(0..boundary.len())];
            img.center(ix, iy)
        })
        .collect();
    let n = img.dim;
    let unit_ball = if n == 1 { 2.0 } else { std::f64::consts::PI };
    let g = img.pixel_size;
    let lookup = |y: &Point| -> f64 {
        // clamp to the grid and add the distance travelled
        let cx = ((y.x - img.origin.x) / g - 0.5).round().clamp(0.0, (img.nx - 1) as f64) as usize;
        let cy = if n == 1 {
            0
        } else {
            ((y.y - img.origin.y) / g - 0.5).round().clamp(0.0, (img.ny - 1) as f64) as usize
        };
        let d = dist[img.idx(cx, cy)];
        if img.locate(y).is_some() {
            d
        } else {
            d + (y - img.center(cx, cy)).norm()
        }
    };
    let mut rows = Vec::with_capacity(radii.len());
    for (ri, &r) in radii.iter().enumerate() {
        let vol = unit_ball * r.powi(n as i32);
        let per_center: Vec<(f64, f64, f64)> = centers
            .par_iter()
            .enumerate()
            .map(|(ci, x)| {
                let mut rng = rng_for(opts.seed, 1000 + (ri * opts.centers + ci) as u64);
                let (mut s1, mut s2, mut excl) = (0.0, 0.0, 0usize);
                for _ in 0..opts.samples {
                    let y = if n == 1 {
                        Point::new(x.x + r * rng.gen_range(-1.0..1.0), 0.0)
                    } else {
                        let rad = r * rng.gen::<f64>().sqrt();
                        let th = rng.gen::<f64>() * std::f64::consts::TAU;
                        x + Point::new(rad * th.cos(), rad * th.sin())
                    };
                    let d = lookup(&y);
                    if d <= 0.0 {
                        excl += 1;
                        continue;
                    }
                    let v = d.powf(-b);
                    s1 += v;
                    s2 += v * v;
                }
                let m = opts.samples as f64;
                let mean = s1 / m;
                let var = (s2 / m - mean * mean).max(0.0);
                let scale = r.powf(a) * vol;
                (scale * mean, scale * (var / m).sqrt(), excl as f64 / m)
            })
            .collect();
        let (mut max_e, mut max_se) = (0.0, 0.0);
        for &(e, se, _) in &per_center {
            if e > max_e {
                max_e = e;
                max_se = se;
            }
        }
        rows.push(ScaleRow {
            r,
            max_estimate: max_e,
            mean_estimate: per_center.iter().map(|p| p.0).sum::<f64>() / per_center.len() as f64,
            max_stderr: max_se,
            excluded_fraction: per_center.iter().map(|p| p.2).fold(0.0, f64::max),
        });
    }
    Ok(rows)
}

fn trend(rows: &[ScaleRow]) -> f64 {
    let lx: Vec<f64> = rows.iter().map(|r| (1.0 / r.r).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.max_estimate.ln()).collect();
    fit_line(&lx, &ly).slope
}

fn check_radii(radii: &[f64], g: f64) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::invalid("radii", "need at least two radii"));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::invalid("radii", "radii must lie in (0, 1]"));
    }
    if radii.iter().any(|&r| r < 4.0 * g) {
        return Err(Error::invalid("radii", format!("radii below 4 pixels ({}) are unresolved", 4.0 * g)));
    }
    Ok(())
}

/// Probe of the class `D^t`: `r^{t-n} ∫_{B(x,r)} dist(y,∂)^{-t} dy`.
pub fn dt_class_probe(img: &RasterImage, t: f64, radii: &[f64], opts: &IntegralProbeOptions) -> Result<TrendReport> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::invalid("t", format!("{t} is not in (0,1)")));
    }
    check_radii(radii, img.pixel_size)?;
    let n = img.dim as f64;
    let rows = distance_integral(img, t - n, t, radii, opts)?;
    let slope = trend(&rows);
    Ok(TrendReport {
        probe: "dt".into(),
        params: serde_json::json!({ "t": t, "radii": radii, "centers": opts.centers, "samples": opts.samples, "seed": opts.seed }),
        slope,
        verdict: Verdict::from_slope(slope),
        tolerances: serde_json::json!({
            "pixel_size": img.pixel_size,
            "bounded_slope": BOUNDED_SLOPE,
            "growing_slope": GROWING_SLOPE,
            "excluded_band": "boundary pixels (distance 0) are skipped",
        }),
        per_scale: rows,
    })
}

/// Aikawa-type integral `r^{-s} ∫_{B(x,r)} dist(y,∂)^{s-n} dy`.
pub fn aikawa_integral_probe(img: &RasterImage, s: f64, radii: &[f64], opts: &IntegralProbeOptions) -> Result<TrendReport> {
    if !(s > 0.0) {
        return Err(Error::invalid("s", format!("{s} must be positive")));
    }
    check_radii(radii, img.pixel_size)?;
    let n = img.dim as f64;
    let rows = distance_integral(img, -s, n - s, radii, opts)?;
    let slope = trend(&rows);
    Ok(TrendReport {
        probe: "aikawa".into(),
        params: serde_json::json!({ "s": s, "radii": radii, "centers": opts.centers, "samples": opts.samples, "seed": opts.seed }),
        slope,
        verdict: Verdict::from_slope(slope),
        tolerances: serde_json::json!({
            "pixel_size": img.pixel_size,
            "bounded_slope": BOUNDED_SLOPE,
            "growing_slope": GROWING_SLOPE,
            "excluded_band": "boundary pixels (distance 0) are skipped",
        }),
        per_scale: rows,
    })
}

/// Bounding box of an invariant ball.
pub fn ball_box(ball: &Ball, dim: usize) -> (Point, Point) {
    let r = ball.radius;
    if dim == 1 {
        (Point::new(ball.center.x - r, 0.0), Point::new(ball.center.x + r, 0.0))
    } else {
        (ball.center - Point::new(r, r), ball.center + Point::new(r, r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::raster::{rasterize_attractor, rasterize_ifs, DEFAULT_PIXEL_CAP};
    use crate::ifs::{library, AttractorModel, SimilarityMap};

    #[test]
    fn square_porosity() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let img = rasterize_attractor(&model, 1.0 / 128.0).unwrap();
        let rep = porosity_probe(&img, (Point::zeros(), Point::new(1.0, 1.0)), 200, (0.1, 1.0), 7).unwrap();
        assert!(rep.eta_min >= 0.2, "{}", rep.eta_min);
        assert!(!rep.failed && !rep.coarse);
    }

    #[test]
    fn all_boundary_raster_is_not_porous() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let mut img = rasterize_attractor(&model, 1.0 / 32.0).unwrap();
        img.classes.fill(PixelClass::Boundary);
        let rep = porosity_probe(&img, (Point::zeros(), Point::new(1.0, 1.0)), 50, (0.25, 1.0), 1).unwrap();
        assert!(rep.failed);
    }

    #[test]
    fn probes_are_deterministic() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let img = rasterize_attractor(&model, 1.0 / 64.0).unwrap();
        let opts = IntegralProbeOptions { centers: 4, samples: 2000, seed: 11 };
        let a = dt_class_probe(&img, 0.5, &[0.5, 0.25], &opts).unwrap();
        let b = dt_class_probe(&img, 0.5, &[0.5, 0.25], &opts).unwrap();
        assert_eq!(a, b);
        assert!(dt_class_probe(&img, 1.0, &[0.5, 0.25], &opts).is_err());
    }

    #[test]
    fn square_osc_holds() {
        let ifs = library::unit_square();
        let model = AttractorModel::new(ifs.clone()).unwrap();
        let img = rasterize_attractor(&model, 1.0 / 64.0).unwrap();
        let rep = osc_and_overlap_probe(&ifs, &img, 5000, 3);
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn touching_squares_overlap_shrinks() {
        let ifs = library::two_touching_squares();
        let model = AttractorModel::new(ifs.clone()).unwrap();
        let coarse = osc_and_overlap_probe(&ifs, &rasterize_attractor(&model, 1.0 / 32.0).unwrap(), 2000, 3);
        let fine = osc_and_overlap_probe(&ifs, &rasterize_attractor(&model, 1.0 / 64.0).unwrap(), 2000, 3);
        assert!(coarse.holds && fine.holds);
        assert!(fine.max_overlap <= coarse.max_overlap);
    }

    #[test]
    fn overlapping_translates_flagged() {
        let maps = vec![
            SimilarityMap::homothety(0.6, Point::new(0.0, 0.0)).unwrap(),
            SimilarityMap::homothety(0.6, Point::new(0.4, 0.0)).unwrap(),
            SimilarityMap::homothety(0.6, Point::new(0.0, 0.4)).unwrap(),
            SimilarityMap::homothety(0.6, Point::new(0.4, 0.4)).unwrap(),
        ];
        let ifs = IteratedFunctionSystem::new("broken", 2, maps, None).unwrap();
        let ball = crate::ifs::attractor::invariant_bounding_ball(&ifs, Point::new(0.5, 0.5));
        let img = rasterize_ifs(&ifs, &ball, 1.0 / 64.0, DEFAULT_PIXEL_CAP).unwrap();
        let rep = osc_and_overlap_probe(&ifs, &img, 2000, 3);
        assert!(!rep.holds);
        assert!(rep.max_overlap > 0.05);
    }
}
