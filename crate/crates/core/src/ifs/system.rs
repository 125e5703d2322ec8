use serde::{Deserialize, Serialize};

use super::similarity::SimilarityMap;
use crate::error::{Error, Result};

/// Tolerance on `sum rho_m^n = 1` for the n-attractor flag.
pub const N_ATTRACTOR_TOL: f64 = 1e-12;

/// An ordered collection of contracting similarities on R^n, n in {1, 2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IteratedFunctionSystem {
    pub name: String,
    pub ambient_dim: usize,
    pub maps: Vec<SimilarityMap>,
    /// Analytic Lebesgue measure of the attractor, when known.
    pub declared_measure: Option<f64>,
}

impl IteratedFunctionSystem {
    pub fn new(
        name: impl Into<String>,
        ambient_dim: usize,
        maps: Vec<SimilarityMap>,
        declared_measure: Option<f64>,
    ) -> Result<Self> {
        if !(1..=2).contains(&ambient_dim) {
            return Err(Error::invalid(
                "ambient_dim",
                format!("{ambient_dim} is not 1 or 2"),
            ));
        }
        if maps.len() < 2 {
            return Err(Error::invalid("maps", "an IFS needs at least two maps"));
        }
        for (k, m) in maps.iter().enumerate() {
            if !(m.rho > 0.0 && m.rho < 1.0) {
                return Err(Error::invalid(
                    format!("maps[{k}].rho"),
                    format!("{} is not in (0,1)", m.rho),
                ));
            }
            if ambient_dim == 1 {
                let q = &m.orthogonal;
                if q[(0, 1)] != 0.0 || q[(1, 0)] != 0.0 || q[(1, 1)] != 1.0 || m.translation.y != 0.0
                {
                    return Err(Error::invalid(
                        format!("maps[{k}]"),
                        "one-dimensional maps must act on the first axis only",
                    ));
                }
            }
        }
        if let Some(mu) = declared_measure {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::invalid("declared_measure", format!("{mu} is not positive")));
            }
        }
        Ok(Self {
            name: name.into(),
            ambient_dim,
            maps,
            declared_measure,
        })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.maps.iter().map(|m| m.rho)
    }

    pub fn rho_min(&self) -> f64 {
        self.ratios().fold(f64::INFINITY, f64::min)
    }

    pub fn rho_max(&self) -> f64 {
        self.ratios().fold(0.0, f64::max)
    }

    pub fn is_homogeneous(&self) -> bool {
        let r0 = self.maps[0].rho;
        self.ratios().all(|r| r == r0)
    }

    /// Measure weights `rho_m^n`.
    pub fn weights(&self) -> Vec<f64> {
        self.ratios().map(|r| r.powi(self.ambient_dim as i32)).collect()
    }

    /// True when `sum rho_m^n = 1` within [`N_ATTRACTOR_TOL`].
    pub fn is_n_attractor(&self) -> bool {
        (self.weights().iter().sum::<f64>() - 1.0).abs() <= N_ATTRACTOR_TOL
    }

    pub fn require_n_attractor(&self) -> Result<()> {
        if self.is_n_attractor() {
            Ok(())
        } else {
            let s: f64 = self.weights().iter().sum();
            Err(Error::invalid(
                "maps",
                format!(
                    "sum of rho^{} is {s}, not 1: not an n-attractor",
                    self.ambient_dim
                ),
            ))
        }
    }

    pub fn similarity_dimension(&self) -> f64 {
        similarity_dimension(&self.ratios().collect::<Vec<_>>())
    }
}

/// Unique `d > 0` with `sum rho_m^d = 1`.
///
/// Newton iteration on the strictly decreasing map `d -> sum rho_m^d - 1`,
/// safeguarded by a bisection bracket. Homogeneous systems use the closed form.
pub fn similarity_dimension(ratios: &[f64]) -> f64 {
    assert!(ratios.len() >= 2, "need at least two ratios");
    assert!(ratios.iter().all(|&r| r > 0.0 && r < 1.0), "ratios must lie in (0,1)");
    let r0 = ratios[0];
    if ratios.iter().all(|&r| r == r0) {
        return (ratios.len() as f64).ln() / (1.0 / r0).ln();
    }
    let f = |d: f64| ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0;
    let df = |d: f64| ratios.iter().map(|r| r.powf(d) * r.ln()).sum::<f64>();
    // f(0) = M - 1 > 0; grow hi until f(hi) < 0
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut d = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = f(d);
        if v == 0.0 {
            return d;
        }
        if v > 0.0 {
            lo = d;
        } else {
            hi = d;
        }
        let step = d - v / df(d);
        let next = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if (next - d).abs() <= 1e-16 * d.max(1.0) {
            return next;
        }
        d = next;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_dimension() {
        assert_eq!(similarity_dimension(&[0.5; 4]), 2.0);
        let d = similarity_dimension(&[1.0 / 3.0; 2]);
        assert!((d - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn inhomogeneous_dimension_solves_moran() {
        let mut r = vec![0.25; 8];
        r.extend([0.5, 0.5]);
        let d = similarity_dimension(&r);
        assert!((d - 2.0).abs() < 1e-12);
        let r = [0.2, 0.5, 0.3];
        let d = similarity_dimension(&r);
        let s: f64 = r.iter().map(|x| x.powf(d)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
