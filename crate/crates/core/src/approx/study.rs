//! Rate studies of `‖f̃ − (P_h f)~‖_{H^{s₁}}` over a sequence of meshes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{deposit_function, deposit_piecewise_constant};
use super::projection::l2_project;
use super::sobolev::fractional_sobolev_norm;
use crate::error::{Error, Result};
use crate::fit::{convergence_rate, LineFit};
use crate::ifs::{generate_diameter_mesh, AttractorModel, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub h: f64,
    pub cells: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionStudy {
    pub s1: f64,
    pub s2: f64,
    pub grid_spacing: f64,
    pub f_norm: f64,
    pub rows: Vec<StudyRow>,
    /// `None` when some error is at rounding level and no slope exists.
    pub fit: Option<LineFit>,
    pub expected_slope: f64,
    pub note: Option<String>,
}

impl ProjectionStudy {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn to_csv(&self) -> String {
        let slope = self.slope().map_or(String::from("nan"), |s| format!("{s:.17e}"));
        let mut out = String::from("h,cells,error,fitted_slope\n");
        for r in &self.rows {
            out.push_str(&format!("{:.17e},{},{:.17e},{}\n", r.h, r.cells, r.error, slope));
        }
        out
    }
}

/// Errors are measured in the `H^{s₁}` grid norm of the zero extensions,
/// sampled on one grid of spacing `g` for all meshes. The default is the
/// largest power of two not above `ρ_min h_min / 4`, which keeps pixels
/// aligned with the cells of dyadic attractors. `s₂` is the assumed regularity, recorded with the expected
/// slope `s₂ − s₁`.
pub fn projection_convergence_study<F>(
    model: &AttractorModel,
    f: F,
    s1: f64,
    s2: f64,
    hs: &[f64],
    g: Option<f64>,
) -> Result<ProjectionStudy>
where
    F: Fn(&Point) -> Complex64,
{
    if hs.len() < 3 {
        return Err(Error::invalid("h", format!("{} mesh sizes; a rate needs at least 3", hs.len())));
    }
    if !(-1.0..=0.0).contains(&s1) || !(0.0..=1.0).contains(&s2) {
        return Err(Error::invalid("s", format!("need s1 in [-1, 0] and s2 in [0, 1], got {s1}, {s2}")));
    }
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let h_min = *hs.last().unwrap();
    let g = g.unwrap_or_else(|| 2f64.powf((model.ifs.rho_min() * h_min / 4.0).log2().floor()));
    let exact = deposit_function(model, g, &f)?;
    let f_norm = fractional_sobolev_norm(&exact, s1)?;
    let mut rows = Vec::with_capacity(hs.len());
    for &h in &hs {
        let mesh = generate_diameter_mesh(model, h)?;
        let q = l2_project(model, &mesh, &f, g);
        let diff = exact.sub(&deposit_piecewise_constant(model, &q, g)?)?;
        rows.push(StudyRow {
            h,
            cells: mesh.len(),
            error: fractional_sobolev_norm(&diff, s1)?,
        });
    }
    let floor = 1e-12 * f_norm.max(f64::MIN_POSITIVE);
    let (fit, note) = if rows.iter().any(|r| r.error <= floor) {
        (
            None,
            Some(format!("errors at rounding level (<= {floor:.3e}); f is reproduced by the projection")),
        )
    } else {
        let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let e: Vec<f64> = rows.iter().map(|r| r.error).collect();
        (Some(convergence_rate(&h, &e)), None)
    };
    Ok(ProjectionStudy {
        s1,
        s2,
        grid_spacing: g,
        f_norm,
        rows,
        fit,
        expected_slope: s2 - s1,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::library;
    use std::f64::consts::PI;

    fn bump(p: &Point) -> Complex64 {
        Complex64::new((PI * p.x).sin() * (PI * p.y).sin(), 0.0)
    }

    #[test]
    fn l2_rate_on_square() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let hs: Vec<f64> = (1..5).map(|k| 2f64.sqrt() * 0.5f64.powi(k)).collect();
        let st = projection_convergence_study(&model, bump, 0.0, 1.0, &hs, None).unwrap();
        let slope = st.slope().unwrap();
        assert!((slope - 1.0).abs() < 0.1, "{st:?}");
        assert_eq!(st.to_csv().lines().count(), 5);
    }

    #[test]
    fn stability_at_equal_orders() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let hs = [0.7, 0.36, 0.18];
        let st = projection_convergence_study(&model, bump, 0.0, 0.0, &hs, Some(1.0 / 64.0)).unwrap();
        assert!(st.rows.iter().all(|r| r.error <= st.f_norm * (1.0 + 1e-12)));
    }

    #[test]
    fn constants_have_no_rate() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let one = |_: &Point| Complex64::new(1.0, 0.0);
        let st = projection_convergence_study(&model, one, -0.5, 0.0, &[0.7, 0.36, 0.18], Some(1.0 / 32.0)).unwrap();
        assert!(st.fit.is_none() && st.note.is_some());
        assert!(projection_convergence_study(&model, one, -0.5, 0.0, &[0.7, 0.36], None).is_err());
        assert!(projection_convergence_study(&model, one, 0.5, 0.0, &[0.7, 0.36, 0.2], None).is_err());
    }
}
