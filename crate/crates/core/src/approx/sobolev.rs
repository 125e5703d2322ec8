//! Fractional Sobolev norms of zero-extended grid fields by the FFT.
//!
//! With the unitary transform `û(ξ) = (2π)^{-n/2} ∫ u e^{-iξ·x}`, the
//! samples give `û(ξ_k) ≈ (2π)^{-n/2} g^n DFT_k` on `ξ_k = 2πk/(Ng)`, and
//! `‖u‖²_{H^s} = ∫ (1+|ξ|²)^s |û|²` is the Riemann sum over that lattice.
//! The field is zero padded to at least twice its extent so the lattice
//! resolves `|û|²`, whose inverse transform is supported on twice the
//! support of `u`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::GridField;
use crate::error::{Error, Result};

pub fn fractional_sobolev_norm(field: &GridField, s: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(Error::invalid("s", format!("{s} is outside [-1, 1]")));
    }
    let g = field.spacing;
    let mx = (2 * field.nx).next_power_of_two();
    let my = if field.n == 2 { (2 * field.ny).next_power_of_two() } else { 1 };
    let mut buf = vec![Complex64::default(); mx * my];
    for j in 0..field.ny {
        buf[j * mx..j * mx + field.nx].copy_from_slice(&field.data[j * field.nx..(j + 1) * field.nx]);
    }
    let mut planner = FftPlanner::<f64>::new();
    let fx = planner.plan_fft_forward(mx);
    for row in buf.chunks_exact_mut(mx).take(field.ny) {
        fx.process(row);
    }
    if my > 1 {
        let fy = planner.plan_fft_forward(my);
        let mut col = vec![Complex64::default(); my];
        for i in 0..mx {
            for j in 0..my {
                col[j] = buf[j * mx + i];
            }
            fy.process(&mut col);
            for j in 0..my {
                buf[j * mx + i] = col[j];
            }
        }
    }
    let freq = |k: usize, m: usize| {
        let k = if k < m / 2 { k as f64 } else { k as f64 - m as f64 };
        std::f64::consts::TAU * k / (m as f64 * g)
    };
    let n = field.n as i32;
    // (2π)^{-n} g^{2n} |DFT|² times the cell Δξ^n = (2π)^n / (mx my g^n)
    let scale = g.powi(n) / (mx * my) as f64;
    let mut sum = 0.0;
    for j in 0..my {
        let ey = if my > 1 { freq(j, my) } else { 0.0 };
        for i in 0..mx {
            let ex = freq(i, mx);
            let w = if s == 0.0 { 1.0 } else { (1.0 + ex * ex + ey * ey).powf(s) };
            sum += w * buf[j * mx + i].norm_sqr();
        }
    }
    Ok((scale * sum).sqrt())
}
