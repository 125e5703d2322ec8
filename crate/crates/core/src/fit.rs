//! Least-squares line fits for log-log rate studies.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ slope * x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    }
}

/// Slope of `log(err)` against `log(h)`, i.e. the observed order `p` in
/// `err ~ h^p`, over the last `ceil(len/2)` entries (at least two).
pub fn convergence_rate(h: &[f64], err: &[f64]) -> LineFit {
    let k = h.len().div_ceil(2).max(2).min(h.len());
    let start = h.len() - k;
    let lx: Vec<f64> = h[start..].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err[start..].iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}
