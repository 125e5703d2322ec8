//! Bessel functions of orders 0 and 1 for positive real arguments.
//!
//! Below [`ASYMPTOTIC_CROSSOVER`] the `J_k` are obtained by Miller's
//! backward recurrence normalized with `J_0 + 2 Σ J_2k = 1`, and the `Y`
//! functions from their Neumann series in the `J_k`. Above it the Hankel
//! asymptotic expansion is summed until its terms stop decreasing.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument where the evaluation switches to the asymptotic expansion.
pub const ASYMPTOTIC_CROSSOVER: f64 = 20.0;

const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;

/// `J_0(x), J_1(x), Y_0(x), Y_1(x)` for `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSet {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

pub fn bessel_set(x: f64) -> BesselSet {
    debug_assert!(x > 0.0);
    if x < ASYMPTOTIC_CROSSOVER {
        miller(x)
    } else {
        asymptotic(x)
    }
}

/// `H_0^{(1)}(x) = J_0(x) + i Y_0(x)`.
pub fn hankel0_first_kind(x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid("x", format!("{x}: H_0 needs a positive finite argument")));
    }
    Ok(hankel0_unchecked(x))
}

#[inline]
pub fn hankel0_unchecked(x: f64) -> Complex64 {
    let b = bessel_set(x);
    Complex64::new(b.j0, b.y0)
}

/// `H_1^{(1)}(x) = J_1(x) + i Y_1(x)`.
pub fn hankel1_first_kind(x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid("x", format!("{x}: H_1 needs a positive finite argument")));
    }
    let b = bessel_set(x);
    Ok(Complex64::new(b.j1, b.y1))
}

fn miller(x: f64) -> BesselSet {
    // start index well past the turning point; even so that J_0 sums cleanly
    let mut top = (x + 30.0 + 8.0 * x.sqrt()) as usize;
    top += top % 2;
    let mut j = vec![0.0f64; top + 2];
    j[top] = 1e-300;
    for k in (1..=top).rev() {
        j[k - 1] = 2.0 * k as f64 / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in j[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    for k in (2..=top).step_by(2) {
        norm += 2.0 * j[k];
    }
    for v in j.iter_mut() {
        *v /= norm;
    }
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    // Y_0 = (2/π)[(ln(x/2)+γ) J_0 − 2 Σ (−1)^k J_2k / k]
    // Y_1 = (2/π)[(ln(x/2)+γ) J_1 − J_0/x + Σ (−1)^k (J_{2k−1} − J_{2k+1}) / k]
    let (mut s0, mut s1) = (0.0, 0.0);
    let mut k = top / 2;
    while k >= 1 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k -= 1;
    }
    BesselSet {
        j0: j[0],
        j1: j[1],
        y0: FRAC_2_PI * (lg * j[0] - 2.0 * s0),
        y1: FRAC_2_PI * (lg * j[1] - j[0] / x + s1),
    }
}

/// `P_ν + i Q_ν` of the Hankel expansion
/// `H_ν(x) = sqrt(2/(πx)) (P + iQ) e^{i(x − νπ/2 − π/4)}`.
fn hankel_pq(nu: f64, x: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    // a_k(ν) i^k / x^k with a_k = Π_{j≤k}(μ − (2j−1)²) / (k! 8^k)
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let f = (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        term *= Complex64::new(0.0, f);
        let size = term.norm();
        if size >= last || size < 1e-18 * sum.norm() {
            if size < last {
                sum += term;
            }
            break;
        }
        sum += term;
        last = size;
    }
    sum
}

fn asymptotic(x: f64) -> BesselSet {
    let amp = (FRAC_2_PI / x).sqrt();
    let (s, c) = x.sin_cos();
    let e = Complex64::new(c, s);
    // e^{-iπ/4} and e^{-3iπ/4}
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h0 = amp * hankel_pq(0.0, x) * e * Complex64::new(r, -r);
    let h1 = amp * hankel_pq(1.0, x) * e * Complex64::new(-r, -r);
    BesselSet {
        j0: h0.re,
        j1: h1.re,
        y0: h0.im,
        y1: h1.im,
    }
}

/// Pieces of the ascending series for small `x`:
/// `J_0(x) − 1` and `S(x)` with `Y_0(x) = (2/π)(ln(x/2)+γ) J_0(x) + S(x)`.
pub fn small_argument_parts(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let (mut j0m1, mut s) = (0.0, 0.0);
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j0m1 += term;
        s -= harmonic * term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    (j0m1, FRAC_2_PI * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_one() {
        let b = bessel_set(1.0);
        assert!((b.j0 - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((b.y0 - 0.088_256_964_215_676_96).abs() < 1e-15);
        assert!((b.j1 - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((b.y1 + 0.781_212_821_300_288_7).abs() < 1e-15);
    }

    #[test]
    fn continuity_at_crossover() {
        let lo = bessel_set(ASYMPTOTIC_CROSSOVER * (1.0 - 1e-15));
        let hi = bessel_set(ASYMPTOTIC_CROSSOVER);
        let h = lo.j0.hypot(lo.y0);
        assert!((lo.j0 - hi.j0).abs() / h < 1e-13 && (lo.y0 - hi.y0).abs() / h < 1e-13);
        // the two regimes agree on an overlap window
        for &x in &[16.0, 18.0, 20.5, 25.0] {
            let m = miller(x);
            let a = asymptotic(x);
            let h = m.j0.hypot(m.y0);
            assert!((m.j0 - a.j0).abs() / h < 5e-13, "{x}");
            assert!((m.y0 - a.y0).abs() / h < 5e-13, "{x}");
        }
    }

    #[test]
    fn small_x_log_asymptotics() {
        let x = 1e-6;
        let b = bessel_set(x);
        let lead = FRAC_2_PI * (0.5 * x).ln() + 2.0 * EULER_GAMMA / std::f64::consts::PI;
        assert!((b.y0 / lead - 1.0).abs() < 1e-4);
    }

    #[test]
    fn small_parts_reassemble() {
        for &x in &[1e-6, 0.01, 0.3, 1.0, 1.9] {
            let (j0m1, s) = small_argument_parts(x);
            let b = bessel_set(x);
            assert!((1.0 + j0m1 - b.j0).abs() < 1e-15, "{x}");
            let y0 = FRAC_2_PI * ((0.5 * x).ln() + EULER_GAMMA) * (1.0 + j0m1) + s;
            assert!((y0 - b.y0).abs() < 1e-14 * (1.0 + b.y0.abs()), "{x}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(hankel0_first_kind(0.0).is_err());
        assert!(hankel0_first_kind(-1.0).is_err());
        assert!(hankel0_first_kind(f64::NAN).is_err());
    }
}
