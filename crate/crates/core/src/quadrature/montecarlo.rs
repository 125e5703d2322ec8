//! Chaos-game Monte-Carlo integration against the self-similar measure.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, Point, SimilarityMap};
use crate::kernels::HelmholtzKernel;

const CHUNK: usize = 1 << 16;

/// Samples the normalized measure on a cell `A(Γ)` by random iteration:
/// children are chosen with probability `ρ_m^n` until the composed cell is
/// smaller than `1e-6 h0`.
#[derive(Debug, Clone)]
pub struct ChaosGame<'a> {
    model: &'a AttractorModel,
    cumulative: Vec<f64>,
    cutoff: f64,
}

impl<'a> ChaosGame<'a> {
    pub fn new(model: &'a AttractorModel) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = model
            .ifs
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *cumulative.last_mut().unwrap() = f64::INFINITY;
        Self {
            model,
            cumulative,
            cutoff: 1e-6,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, cell: &SimilarityMap) -> Point {
        let maps = &self.model.ifs.maps;
        let mut word = [0u16; 128];
        let mut len = 0;
        let mut rho = cell.rho;
        while rho >= self.cutoff && len < word.len() {
            let u: f64 = rng.gen();
            let m = self.cumulative.partition_point(|&c| c <= u);
            word[len] = m as u16;
            len += 1;
            rho *= maps[m].rho;
        }
        let mut x = self.model.barycenter;
        for &m in word[..len].iter().rev() {
            x = maps[m as usize].apply(&x);
        }
        cell.apply(&x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
}

impl McEstimate {
    pub fn value(&self) -> f64 {
        self.estimate.re
    }

    pub fn stderr(&self) -> f64 {
        self.stderr_re
    }

    /// True when `x` lies within `k` standard errors in both components.
    pub fn agrees(&self, x: Complex64, k: f64) -> bool {
        (x.re - self.estimate.re).abs() <= k * self.stderr_re
            && (x.im - self.estimate.im).abs() <= k * self.stderr_im
    }
}

/// Mean and standard error of `f` over `samples` draws, using one ChaCha
/// stream per chunk and a fixed reduction order.
fn sample_mean<F>(samples: usize, seed: u64, f: F) -> (Complex64, f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> Complex64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut acc = [0.0; 4];
            for _ in 0..count {
                let v = f(&mut rng);
                acc[0] += v.re;
                acc[1] += v.im;
                acc[2] += v.re * v.re;
                acc[3] += v.im * v.im;
            }
            acc
        })
        .collect();
    let mut acc = [0.0; 4];
    for p in &partial {
        for k in 0..4 {
            acc[k] += p[k];
        }
    }
    let m = samples as f64;
    let (mr, mi) = (acc[0] / m, acc[1] / m);
    let vr = (acc[2] / m - mr * mr).max(0.0);
    let vi = (acc[3] / m - mi * mi).max(0.0);
    (Complex64::new(mr, mi), (vr / m).sqrt(), (vi / m).sqrt())
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 1000 {
        return Err(Error::invalid("samples", format!("{samples} < 1000")));
    }
    Ok(())
}

fn cell_measure(model: &AttractorModel, cell: &SimilarityMap) -> f64 {
    cell.rho.powi(model.n() as i32) * model.measure()
}

/// `∫_{A(Γ)} f` by chaos-game sampling.
pub fn mc_integrate_cell<F>(model: &AttractorModel, cell: &SimilarityMap, f: F, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&Point) -> Complex64 + Sync,
{
    check_samples(samples)?;
    let game = ChaosGame::new(model);
    let (mean, sr, si) = sample_mean(samples, seed, |rng| f(&game.sample(rng, cell)));
    let mu = cell_measure(model, cell);
    Ok(McEstimate {
        estimate: mean * mu,
        stderr_re: sr * mu,
        stderr_im: si * mu,
        samples,
        seed,
        method: "chaos game, uniform on the self-similar measure".into(),
    })
}

/// `∫_{A(Γ)} ∫_{B(Γ)} f(x, y)` for a bounded integrand.
pub fn mc_double_integral<F>(
    model: &AttractorModel,
    a: &SimilarityMap,
    b: &SimilarityMap,
    f: F,
    samples: usize,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&Point, &Point) -> Complex64 + Sync,
{
    check_samples(samples)?;
    let game = ChaosGame::new(model);
    let (mean, sr, si) = sample_mean(samples, seed, |rng| {
        let x = game.sample(rng, a);
        let y = game.sample(rng, b);
        f(&x, &y)
    });
    let mu = cell_measure(model, a) * cell_measure(model, b);
    Ok(McEstimate {
        estimate: mean * mu,
        stderr_re: sr * mu,
        stderr_im: si * mu,
        samples,
        seed,
        method: "chaos game, independent pairs".into(),
    })
}

/// `∫_{A(Γ)} ∫_{B(Γ)} |x − y|^{-t}` by importance sampling around `x`.
///
/// `x` is drawn from the measure on `A(Γ)`. Given `x`, `y = x + r ω` with
/// `ω` uniform on the unit sphere of `R^n` (an antithetic pair `±ω`) and
/// `r ∈ (0, R]` with density `∝ r^{n−1−t}`, where `R` bounds `|x − y|` over
/// `B(Γ)`. The weight `|y − x|^{-t} / p(y)` is then the constant
/// `|S^{n−1}| R^{n−t}/(n−t)`, so the estimator is that constant times the
/// indicator `y ∈ B(Γ)` given by `member`.
pub fn mc_singular_pair<M>(
    model: &AttractorModel,
    a: &SimilarityMap,
    b: &SimilarityMap,
    t: f64,
    member: M,
    samples: usize,
    seed: u64,
) -> Result<McEstimate>
where
    M: Fn(&Point) -> bool + Sync,
{
    check_samples(samples)?;
    let n = model.n();
    if !(t > 0.0 && t < n as f64) {
        return Err(Error::invalid("t", format!("{t} is not in (0, {n})")));
    }
    let game = ChaosGame::new(model);
    let bb = model.bounding_ball.mapped(b);
    let sphere = if n == 1 { 2.0 } else { TAU };
    let e = n as f64 - t;
    let (mean, sr, _) = sample_mean(samples, seed, |rng| {
        let x = game.sample(rng, a);
        let big_r = (x - bb.center).norm() + bb.radius;
        let r = big_r * rng.gen::<f64>().powf(1.0 / e);
        let dir = if n == 1 {
            Point::new(1.0, 0.0)
        } else {
            let th = rng.gen::<f64>() * TAU;
            Point::new(th.cos(), th.sin())
        };
        let hits = member(&(x + dir * r)) as u8 + member(&(x - dir * r)) as u8;
        let w = sphere * big_r.powf(e) / e;
        Complex64::new(0.5 * w * hits as f64, 0.0)
    });
    let mu = cell_measure(model, a);
    Ok(McEstimate {
        estimate: mean * mu,
        stderr_re: sr * mu,
        stderr_im: 0.0,
        samples,
        seed,
        method: format!("radial importance sampling, density r^(n-1-t), antithetic directions, t = {t}"),
    })
}

/// `∫_{A(Γ)} ∫_{B(Γ)} Φ(|x − y|)` for the `n = 2` kernel: the `1/(4πr)`
/// part by [`mc_singular_pair`], the smooth remainder by independent pairs.
pub fn mc_helmholtz_pair<M>(
    model: &AttractorModel,
    a: &SimilarityMap,
    b: &SimilarityMap,
    kernel: &HelmholtzKernel,
    member: M,
    samples: usize,
    seed: u64,
) -> Result<McEstimate>
where
    M: Fn(&Point) -> bool + Sync,
{
    if kernel.n != 2 {
        return Err(Error::invalid("n", "the Helmholtz oracle covers n = 2"));
    }
    let s = mc_singular_pair(model, a, b, 1.0, member, samples, seed)?;
    let r = mc_double_integral(model, a, b, |x, y| kernel.remainder((x - y).norm()), samples, seed ^ 0x9e37_79b9)?;
    let c = 1.0 / (4.0 * std::f64::consts::PI);
    Ok(McEstimate {
        estimate: s.estimate * c + r.estimate,
        stderr_re: (c * c * s.stderr_re * s.stderr_re + r.stderr_re * r.stderr_re).sqrt(),
        stderr_im: r.stderr_im,
        samples,
        seed,
        method: format!("{}; remainder: {}", s.method, r.method),
    })
}
