//! Fundamental solutions of the Helmholtz equation in `R^{n+1}` restricted
//! to the screen plane, and their singular/smooth splitting.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{hankel0_unchecked, small_argument_parts, EULER_GAMMA};
use crate::error::{Error, Result};

/// A positive wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("k", format!("{k} must be positive")));
        }
        Ok(Self(k))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Helmholtz kernel for a screen of dimension `n` at wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelmholtzKernel {
    pub n: usize,
    pub k: f64,
}

/// The singular part of a split kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SingularPart {
    /// `c · r^{-t}`.
    Power { t: f64, coefficient: f64 },
    /// `c · ln r`.
    Log { coefficient: f64 },
}

impl SingularPart {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            SingularPart::Power { t, coefficient } => coefficient * r.powf(-t),
            SingularPart::Log { coefficient } => coefficient * r.ln(),
        }
    }
}

impl HelmholtzKernel {
    pub fn new(n: usize, k: Wavenumber) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::invalid("n", format!("screen dimension {n} is not 1 or 2")));
        }
        Ok(Self { n, k: k.get() })
    }

    /// `Φ(r)`; `r` must be positive.
    #[inline]
    pub fn phi(&self, r: f64) -> Complex64 {
        if self.n == 2 {
            let (s, c) = (self.k * r).sin_cos();
            Complex64::new(c, s) / (4.0 * PI * r)
        } else {
            Complex64::new(0.0, 0.25) * hankel0_unchecked(self.k * r)
        }
    }

    pub fn singular(&self) -> SingularPart {
        if self.n == 2 {
            SingularPart::Power { t: 1.0, coefficient: 1.0 / (4.0 * PI) }
        } else {
            SingularPart::Log { coefficient: -1.0 / (2.0 * PI) }
        }
    }

    /// Limit of the smooth remainder at `r = 0`.
    pub fn remainder_at_zero(&self) -> Complex64 {
        if self.n == 2 {
            Complex64::new(0.0, self.k / (4.0 * PI))
        } else {
            Complex64::new(-((0.5 * self.k).ln() + EULER_GAMMA) / (2.0 * PI), 0.25)
        }
    }

    /// `Φ(r) − singular(r)`, continuous on `[0, ∞)`.
    #[inline]
    pub fn remainder(&self, r: f64) -> Complex64 {
        if r == 0.0 {
            return self.remainder_at_zero();
        }
        let x = self.k * r;
        if self.n == 2 {
            // (e^{ix} − 1)/(4πr) without cancellation
            let h = (0.5 * x).sin();
            Complex64::new(-2.0 * h * h, x.sin()) / (4.0 * PI * r)
        } else if x < 0.5 {
            let (j0m1, s) = small_argument_parts(x);
            let j0 = 1.0 + j0m1;
            let re = -((0.5 * self.k).ln() + EULER_GAMMA) * j0 / (2.0 * PI)
                - r.ln() * j0m1 / (2.0 * PI)
                - 0.25 * s;
            Complex64::new(re, 0.25 * j0)
        } else {
            self.phi(r) + r.ln() / (2.0 * PI)
        }
    }
}

/// Checked `Φ` for screen dimension `n`.
pub fn fundamental_solution(n: usize, k: f64, r: f64) -> Result<Complex64> {
    let kernel = HelmholtzKernel::new(n, Wavenumber::new(k)?)?;
    if !(r > 0.0) {
        return Err(Error::invalid("r", format!("{r}: the kernel is singular at r = 0")));
    }
    Ok(kernel.phi(r))
}

/// `(singular, remainder)` at distance `r`; the singular part is infinite at
/// `r = 0` while the remainder takes its limit there.
pub fn kernel_split(n: usize, k: f64, r: f64) -> Result<(f64, Complex64)> {
    let kernel = HelmholtzKernel::new(n, Wavenumber::new(k)?)?;
    let sing = if r == 0.0 { f64::INFINITY } else { kernel.singular().eval(r) };
    Ok((sing, kernel.remainder(r)))
}

/// `Φ(|x − y|)` between points of `R^{n+1}`.
pub fn phi_points(kernel: &HelmholtzKernel, x: &[f64; 3], y: &[f64; 3]) -> Complex64 {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if kernel.n == 2 {
        kernel.phi(r)
    } else {
        // the n = 1 screen lives in R^2; the third coordinate is unused
        kernel.phi(d[0].hypot(d[1]))
    }
}
