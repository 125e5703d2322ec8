//! Self-convergence of Galerkin solutions against a fine reference mesh.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assemble::{assemble, GalerkinSystem};
use super::config::ScatteringConfig;
use super::field::{evaluate_field_many, FieldRule};
use super::solve::{solve, DensitySolution};
use crate::approx::{deposit_piecewise_constant, fractional_sobolev_norm, GridField};
use crate::error::{Error, Result};
use crate::fit::{convergence_rate, LineFit};
use crate::ifs::{AttractorModel, MeshParameter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BemStudyOptions {
    /// Meshes from coarse to fine.
    pub meshes: Vec<MeshParameter>,
    pub reference: MeshParameter,
    /// Points off the screen for the field track; defaults around the screen
    /// at distance about `3 h0`.
    pub far_points: Option<Vec<[f64; 3]>>,
    /// Raster spacing for the `H^{-1/2}` track; defaults to the largest
    /// power of two not above `ρ_min h_ref / 4`.
    pub grid_spacing: Option<f64>,
    pub field_rule: FieldRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BemStudyRow {
    pub h: f64,
    pub cells: usize,
    /// Grid `H^{-1/2}` norm of `φ_h − φ_ref`.
    pub energy_error: f64,
    /// `⟨g, φ_h⟩`.
    pub functional: Complex64,
    pub functional_error: f64,
    /// Largest `|u_h − u_ref|` over the far points.
    pub field_error: f64,
    pub residual: f64,
    pub l1_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BemStudy {
    pub rows: Vec<BemStudyRow>,
    pub reference_h: f64,
    pub reference_cells: usize,
    pub reference_functional: Complex64,
    pub reference_residual: f64,
    pub grid_spacing: f64,
    pub far_points: Vec<[f64; 3]>,
    pub energy_fit: Option<LineFit>,
    pub functional_fit: Option<LineFit>,
    pub field_fit: Option<LineFit>,
    /// Tracks whose errors do not decrease strictly with `h`.
    pub non_monotone: Vec<String>,
}

impl BemStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "h,cells,energy_error,functional_error,field_error,functional_re,functional_im,residual,l1_norm\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.h,
                r.cells,
                r.energy_error,
                r.functional_error,
                r.field_error,
                r.functional.re,
                r.functional.im,
                r.residual,
                r.l1_norm
            ));
        }
        out
    }
}

/// `⟨g, φ_h⟩ = −Σ c_i b_i`, since `∫_{Ω_i} g = −|Ω_i|^{1/2} b_i`.
pub fn load_functional(system: &GalerkinSystem, sol: &DensitySolution) -> Complex64 {
    -sol
        .coefficients
        .iter()
        .zip(system.rhs.iter())
        .map(|(c, b)| c * b)
        .sum::<Complex64>()
}

pub fn default_far_points(model: &AttractorModel) -> Vec<[f64; 3]> {
    let c = model.barycenter;
    let h = model.h0();
    if model.n() == 2 {
        vec![
            [c.x + 2.0 * h, c.y, 2.0 * h],
            [c.x, c.y - h, 3.0 * h],
            [c.x - 2.0 * h, c.y + h, -2.0 * h],
        ]
    } else {
        vec![[c.x + 2.0 * h, 2.0 * h, 0.0], [c.x, 3.0 * h, 0.0], [c.x - 2.0 * h, -2.0 * h, 0.0]]
    }
}

struct Solved {
    h: f64,
    sol: DensitySolution,
    functional: Complex64,
    raster: GridField,
    field: Vec<Complex64>,
}

fn run(config: &ScatteringConfig, mesh: MeshParameter, g: f64, points: &[[f64; 3]], rule: FieldRule) -> Result<Solved> {
    let cfg = config.with_mesh(mesh)?;
    let system = assemble(&cfg)?;
    let sol = solve(&system)?;
    let functional = load_functional(&system, &sol);
    drop(system);
    let raster = deposit_piecewise_constant(&cfg.model, &sol.as_piecewise_constant(), g)?;
    let field = evaluate_field_many(&cfg.model, &sol, points, rule)?;
    Ok(Solved {
        h: sol.mesh.h(),
        sol,
        functional,
        raster,
        field,
    })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fit(h: &[f64], e: &[f64]) -> Option<LineFit> {
    if e.iter().all(|v| *v > 0.0 && v.is_finite()) {
        Some(convergence_rate(h, e))
    } else {
        None
    }
}

pub fn convergence_study(config: &ScatteringConfig, opts: &BemStudyOptions) -> Result<BemStudy> {
    if opts.meshes.len() < 4 {
        return Err(Error::invalid("meshes", format!("{} meshes; the study needs at least 4", opts.meshes.len())));
    }
    let model = &config.model;
    let mesh_h = |m: &MeshParameter| match *m {
        MeshParameter::Level(l) => model.h0() * model.ifs.rho_max().powi(l as i32),
        MeshParameter::Diameter(h) => h,
    };
    let h_min = opts.meshes.iter().map(mesh_h).fold(f64::INFINITY, f64::min);
    let h_ref = mesh_h(&opts.reference);
    if h_ref > h_min / 4.0 * (1.0 + 1e-9) {
        return Err(Error::invalid("reference", format!("h_ref = {h_ref} exceeds h_min/4 = {}", h_min / 4.0)));
    }
    let g = opts
        .grid_spacing
        .unwrap_or_else(|| 2f64.powf((model.ifs.rho_min() * h_ref / 4.0).log2().floor()));
    let points = opts.far_points.clone().unwrap_or_else(|| default_far_points(model));

    let reference = run(config, opts.reference, g, &points, opts.field_rule)?;
    let mut rows = Vec::new();
    for &m in &opts.meshes {
        let s = run(config, m, g, &points, opts.field_rule)?;
        let diff = s.raster.sub(&reference.raster)?;
        let field_error = s
            .field
            .iter()
            .zip(&reference.field)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        rows.push(BemStudyRow {
            h: s.h,
            cells: s.sol.len(),
            energy_error: fractional_sobolev_norm(&diff, -0.5)?,
            functional: s.functional,
            functional_error: (s.functional - reference.functional).norm(),
            field_error,
            residual: s.sol.residual,
            l1_norm: s.sol.l1_norm(),
        });
    }
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let track = |f: fn(&BemStudyRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let (e, fe, ue) = (track(|r| r.energy_error), track(|r| r.functional_error), track(|r| r.field_error));
    let mut non_monotone = Vec::new();
    for (name, v) in [("energy", &e), ("functional", &fe), ("field", &ue)] {
        if !strictly_decreasing(v) {
            non_monotone.push(name.to_string());
        }
    }
    Ok(BemStudy {
        energy_fit: fit(&h, &e),
        functional_fit: fit(&h, &fe),
        field_fit: fit(&h, &ue),
        rows,
        reference_h: reference.h,
        reference_cells: reference.sol.len(),
        reference_functional: reference.functional,
        reference_residual: reference.sol.residual,
        grid_spacing: g,
        far_points: points,
        non_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::library;

    #[test]
    fn small_square_study() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let cfg = ScatteringConfig::normal_incidence(model, 2.0, MeshParameter::Level(0)).unwrap();
        let opts = BemStudyOptions {
            meshes: (0..4).map(MeshParameter::Level).collect(),
            reference: MeshParameter::Level(5),
            far_points: None,
            grid_spacing: None,
            field_rule: FieldRule::default(),
        };
        let st = convergence_study(&cfg, &opts).unwrap();
        assert_eq!(st.rows.len(), 4);
        assert_eq!(st.reference_cells, 1024);
        assert!(st.rows.iter().all(|r| r.residual < 1e-10));
        assert!(st.energy_fit.unwrap().slope > 0.2, "{st:?}");
        assert_eq!(st.to_csv().lines().count(), 5);
    }

    #[test]
    fn rejects_coarse_reference() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let cfg = ScatteringConfig::normal_incidence(model, 2.0, MeshParameter::Level(0)).unwrap();
        let mut opts = BemStudyOptions {
            meshes: (0..4).map(MeshParameter::Level).collect(),
            reference: MeshParameter::Level(4),
            far_points: None,
            grid_spacing: None,
            field_rule: FieldRule::default(),
        };
        assert!(convergence_study(&cfg, &opts).is_err());
        opts.meshes.truncate(3);
        opts.reference = MeshParameter::Level(6);
        assert!(convergence_study(&cfg, &opts).is_err());
    }
}
