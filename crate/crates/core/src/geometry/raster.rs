//! Pixel rasters of attractors and the Euclidean distance transform.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, Ball, IteratedFunctionSystem, Point, SimilarityMap};

/// Default cap on the number of pixels in a raster.
pub const DEFAULT_PIXEL_CAP: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum PixelClass {
    Outside,
    Boundary,
    Inside,
    Unknown,
}

/// Regular grid of labelled pixels. In one dimension the grid is a single
/// row straddling the first axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RasterImage {
    /// Lower-left corner of pixel `(0, 0)`.
    pub origin: Point,
    pub pixel_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub dim: usize,
    pub classes: Vec<PixelClass>,
}

impl RasterImage {
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    #[inline]
    pub fn class(&self, ix: usize, iy: usize) -> PixelClass {
        self.classes[self.idx(ix, iy)]
    }

    pub fn center(&self, ix: usize, iy: usize) -> Point {
        let g = self.pixel_size;
        let y = if self.dim == 1 { 0.0 } else { self.origin.y + (iy as f64 + 0.5) * g };
        Point::new(self.origin.x + (ix as f64 + 0.5) * g, y)
    }

    /// Pixel containing `p`, if inside the grid.
    pub fn locate(&self, p: &Point) -> Option<(usize, usize)> {
        let g = self.pixel_size;
        let fx = ((p.x - self.origin.x) / g).floor();
        let fy = if self.dim == 1 { 0.0 } else { ((p.y - self.origin.y) / g).floor() };
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn count(&self, class: PixelClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Lebesgue measure of one pixel in the ambient dimension.
    pub fn pixel_measure(&self) -> f64 {
        self.pixel_size.powi(self.dim as i32)
    }

    pub fn area(&self, class: PixelClass) -> f64 {
        self.count(class) as f64 * self.pixel_measure()
    }

    pub fn is_touched(&self, ix: usize, iy: usize) -> bool {
        matches!(self.class(ix, iy), PixelClass::Inside | PixelClass::Boundary)
    }

    pub fn pixels_of(&self, class: PixelClass) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if self.class(ix, iy) == class {
                    out.push((ix, iy));
                }
            }
        }
        out
    }

    /// Euclidean distance from each pixel center to the nearest Boundary
    /// pixel center, row-major. Boundary pixels get 0; rasters without a
    /// boundary get `+inf` everywhere.
    pub fn distance_to_boundary(&self) -> Vec<f64> {
        let mut f: Vec<f64> = self
            .classes
            .iter()
            .map(|&c| if c == PixelClass::Boundary { 0.0 } else { f64::INFINITY })
            .collect();
        squared_edt(&mut f, self.nx, self.ny);
        let g = self.pixel_size;
        f.into_iter().map(|d| d.sqrt() * g).collect()
    }
}

/// Separable squared distance transform (lower envelope of parabolas),
/// in pixel units, in place.
fn squared_edt(f: &mut [f64], nx: usize, ny: usize) {
    let mut buf = vec![0.0; nx.max(ny)];
    let mut out = vec![0.0; nx.max(ny)];
    for iy in 0..ny {
        buf[..nx].copy_from_slice(&f[iy * nx..(iy + 1) * nx]);
        edt_1d(&buf[..nx], &mut out[..nx]);
        f[iy * nx..(iy + 1) * nx].copy_from_slice(&out[..nx]);
    }
    for ix in 0..nx {
        for iy in 0..ny {
            buf[iy] = f[iy * nx + ix];
        }
        edt_1d(&buf[..ny], &mut out[..ny]);
        for iy in 0..ny {
            f[iy * nx + ix] = out[iy];
        }
    }
}

fn edt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
    if sites.is_empty() {
        d.fill(f64::INFINITY);
        return;
    }
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    let inter = |q: usize, p: usize| {
        let (qf, pf) = (q as f64, p as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * qf - 2.0 * pf)
    };
    for &q in &sites {
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.clear();
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let s = inter(q, p);
                    if s <= *z.last().unwrap() {
                        v.pop();
                        z.pop();
                        if v.is_empty() {
                            continue;
                        }
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    z.push(f64::INFINITY);
    let mut k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let p = v[k];
        let dp = qf - p as f64;
        *dq = dp * dp + f[p];
    }
}

/// Rasterizes the attractor of `ifs` given an invariant ball.
///
/// Cells are refined until their ball has radius at most `g/2`; every pixel
/// meeting such a ball is touched. Touched pixels whose whole neighbourhood
/// (8 neighbours in the plane, 2 on the line) is touched are Inside, the
/// rest are Boundary; untouched pixels are Outside.
pub fn rasterize_ifs(
    ifs: &IteratedFunctionSystem,
    ball: &Ball,
    pixel_size: f64,
    pixel_cap: usize,
) -> Result<RasterImage> {
    let g = pixel_size;
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::invalid("pixel_size", format!("{g} must be positive")));
    }
    let dim = ifs.ambient_dim;
    let half = ball.radius + 2.0 * g;
    let nx = (2.0 * half / g).ceil() as usize + 1;
    let ny = if dim == 1 { 1 } else { nx };
    if nx.saturating_mul(ny) > pixel_cap {
        return Err(Error::invalid(
            "pixel_size",
            format!("grid {nx}x{ny} exceeds the pixel cap {pixel_cap}"),
        ));
    }
    let origin = if dim == 1 {
        Point::new(ball.center.x - half, -0.5 * g)
    } else {
        Point::new(ball.center.x - half, ball.center.y - half)
    };
    let touched: Vec<AtomicBool> = (0..nx * ny).map(|_| AtomicBool::new(false)).collect();

    // split into subtrees for parallel descent
    let mut roots = vec![SimilarityMap::identity()];
    while roots.len() < 64 && ball.radius * roots[0].rho > 0.5 * g {
        roots = roots
            .iter()
            .flat_map(|r| ifs.maps.iter().map(move |m| r.compose(m)))
            .collect();
    }
    roots.par_iter().for_each(|root| {
        let mut stack = vec![*root];
        while let Some(map) = stack.pop() {
            let b = ball.mapped(&map);
            if b.radius <= 0.5 * g {
                mark_disk(&b, origin, g, nx, ny, dim, &touched);
            } else {
                stack.extend(ifs.maps.iter().map(|m| map.compose(m)));
            }
        }
    });

    let touched: Vec<bool> = touched.into_iter().map(|a| a.into_inner()).collect();
    let mut classes = vec![PixelClass::Outside; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let i = iy * nx + ix;
            if !touched[i] {
                continue;
            }
            let mut interior = true;
            'nb: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dim == 1 && dy != 0 {
                        continue;
                    }
                    let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                    if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                        interior = false;
                        break 'nb;
                    }
                    if !touched[jy as usize * nx + jx as usize] {
                        interior = false;
                        break 'nb;
                    }
                }
            }
            classes[i] = if interior { PixelClass::Inside } else { PixelClass::Boundary };
        }
    }
    Ok(RasterImage {
        origin,
        pixel_size: g,
        nx,
        ny,
        dim,
        classes,
    })
}

fn mark_disk(b: &Ball, origin: Point, g: f64, nx: usize, ny: usize, dim: usize, touched: &[AtomicBool]) {
    let r = b.radius;
    let x0 = (((b.center.x - r - origin.x) / g).floor().max(0.0)) as usize;
    let x1 = (((b.center.x + r - origin.x) / g).floor() as usize).min(nx - 1);
    let (y0, y1) = if dim == 1 {
        (0, 0)
    } else {
        (
            (((b.center.y - r - origin.y) / g).floor().max(0.0)) as usize,
            (((b.center.y + r - origin.y) / g).floor() as usize).min(ny - 1),
        )
    };
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            // distance from the disk center to the pixel square
            let lx = origin.x + ix as f64 * g;
            let dx = (lx - b.center.x).max(b.center.x - lx - g).max(0.0);
            let dy = if dim == 1 {
                0.0
            } else {
                let ly = origin.y + iy as f64 * g;
                (ly - b.center.y).max(b.center.y - ly - g).max(0.0)
            };
            if dx * dx + dy * dy <= r * r {
                touched[iy * nx + ix].store(true, Ordering::Relaxed);
            }
        }
    }
}

/// Raster of an attractor model; `pixel_size` must be below `h0/4`.
pub fn rasterize_attractor(model: &AttractorModel, pixel_size: f64) -> Result<RasterImage> {
    if !(pixel_size < model.h0() / 4.0) {
        return Err(Error::invalid(
            "pixel_size",
            format!("{pixel_size} is not below h0/4 = {}", model.h0() / 4.0),
        ));
    }
    rasterize_ifs(&model.ifs, &model.bounding_ball, pixel_size, DEFAULT_PIXEL_CAP)
}

/// Raster estimate of the Lebesgue measure of an attractor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub bar: f64,
    pub inside_area: f64,
    pub touched_area: f64,
    /// Relative bar exceeds the 1e-3 target.
    pub flagged: bool,
}

/// Midpoint between the Inside area and the touched area, with half their
/// difference as the bar.
pub fn raster_measure(model: &AttractorModel, pixel_size: f64) -> Result<MeasureEstimate> {
    let img = rasterize_ifs(&model.ifs, &model.bounding_ball, pixel_size, DEFAULT_PIXEL_CAP)?;
    Ok(measure_from_raster(&img))
}

pub fn measure_from_raster(img: &RasterImage) -> MeasureEstimate {
    let inside = img.area(PixelClass::Inside);
    let touched = inside + img.area(PixelClass::Boundary);
    let value = 0.5 * (inside + touched);
    let bar = 0.5 * (touched - inside);
    MeasureEstimate {
        value,
        bar,
        inside_area: inside,
        touched_area: touched,
        flagged: bar > 1e-3 * value,
    }
}
