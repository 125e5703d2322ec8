//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracscreen_core::approx::{l2_error, l2_norm_of, l2_project, poincare_bound_check, projection_convergence_study};
use fracscreen_core::bem::{
    assemble, convergence_study, evaluate_field_many, load_functional, solve, BemStudyOptions, FieldRule,
    ScatteringConfig,
};
use fracscreen_core::geometry::{
    aikawa_integral_probe, boundary_box_dimension, dt_class_probe, dyadic_scales, measure_from_raster,
    osc_and_overlap_probe, porosity_probe, rasterize_attractor, IntegralProbeOptions, PixelClass, RasterImage,
};
use fracscreen_core::ifs::io::parse_ifs_file;
use fracscreen_core::kernels::{IncidentPlaneWave, Wavenumber};
use fracscreen_core::{library, AttractorModel, MeshParameter, Point};
use nalgebra::Vector3;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::CliError;
use crate::jsonout;

type Result<T> = std::result::Result<T, CliError>;

/// Files written by a run, relative to the output directory.
pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: impl AsRef<Path>, contents: &str) -> Result<()> {
        let path = self.dir.join(name.as_ref());
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.as_ref().display().to_string());
        Ok(())
    }

    pub fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, &jsonout::to_string(value))
    }
}

/// Short name of the subcommand, e.g. `"bem solve"`.
pub fn command_name(cfg: &RunConfig) -> &'static str {
    match cfg {
        RunConfig::Attractor(AttractorCmd::Info(_)) => "attractor info",
        RunConfig::Attractor(AttractorCmd::Mesh(_)) => "attractor mesh",
        RunConfig::Attractor(AttractorCmd::Render(_)) => "attractor render",
        RunConfig::Geom(GeomCmd::Dim(_)) => "geom dim",
        RunConfig::Geom(GeomCmd::Porosity(_)) => "geom porosity",
        RunConfig::Geom(GeomCmd::Osc(_)) => "geom osc",
        RunConfig::Geom(GeomCmd::Dt(_)) => "geom dt",
        RunConfig::Geom(GeomCmd::Aikawa(_)) => "geom aikawa",
        RunConfig::Approx(ApproxCmd::Project(_)) => "approx project",
        RunConfig::Approx(ApproxCmd::Converge(_)) => "approx converge",
        RunConfig::Bem(BemCmd::Solve(_)) => "bem solve",
        RunConfig::Bem(BemCmd::Converge(_)) => "bem converge",
        RunConfig::Bem(BemCmd::Field(_)) => "bem field",
        RunConfig::Replay { .. } => "replay",
    }
}

/// Runs one configuration and returns the `result` part of the summary.
pub fn execute(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    match cfg {
        RunConfig::Attractor(c) => match c {
            AttractorCmd::Info(a) => attractor_info(a, out),
            AttractorCmd::Mesh(a) => attractor_mesh(a, out),
            AttractorCmd::Render(a) => attractor_render(a, out),
        },
        RunConfig::Geom(c) => match c {
            GeomCmd::Dim(a) => geom_dim(a, out),
            GeomCmd::Porosity(a) => geom_porosity(a, out),
            GeomCmd::Osc(a) => geom_osc(a, out),
            GeomCmd::Dt(a) => geom_dt(a, out),
            GeomCmd::Aikawa(a) => geom_aikawa(a, out),
        },
        RunConfig::Approx(c) => match c {
            ApproxCmd::Project(a) => approx_project(a, out),
            ApproxCmd::Converge(a) => approx_converge(a, out),
        },
        RunConfig::Bem(c) => match c {
            BemCmd::Solve(a) => bem_solve(a, out),
            BemCmd::Converge(a) => bem_converge(a, out),
            BemCmd::Field(a) => bem_field(a, out),
        },
        RunConfig::Replay { .. } => Err(CliError::validation("config", "a replayed configuration cannot itself be a replay")),
    }
}

// ---------------------------------------------------------------- inputs

fn load_model(src: &Source, require_n_attractor: bool) -> Result<AttractorModel> {
    let ifs = match &src.ifs {
        Some(path) => parse_ifs_file(path).map_err(|e| CliError::from(e).in_file(path))?,
        None => library::by_name(&src.attractor)?,
    };
    if require_n_attractor {
        ifs.require_n_attractor()?;
    }
    Ok(AttractorModel::new(ifs)?)
}

fn mesh_parameter(m: &MeshArgs) -> Result<MeshParameter> {
    match (m.h, m.level) {
        (Some(h), None) => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::validation("h", format!("{h} must be positive")));
            }
            Ok(MeshParameter::Diameter(h))
        }
        (None, Some(l)) => Ok(MeshParameter::Level(l)),
        _ => Err(CliError::validation("mesh", "give exactly one of --h and --level")),
    }
}

fn incident_wave(model: &AttractorModel, w: &WaveArgs) -> Result<IncidentPlaneWave> {
    let k = Wavenumber::new(w.k)?;
    let (th, ph) = (w.theta.to_radians(), w.phi.to_radians());
    if !(w.theta.abs() < 90.0) {
        return Err(CliError::validation("theta", format!("{} must lie in (-90, 90) degrees", w.theta)));
    }
    let n = model.n();
    let d = if n == 1 {
        Vector3::new(th.sin(), -th.cos(), 0.0)
    } else {
        Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), -th.cos())
    };
    Ok(IncidentPlaneWave::new(k, d.normalize(), n)?)
}

type ScalarFn = Box<dyn Fn(&Point) -> f64 + Sync>;
type GradFn = Box<dyn Fn(&Point) -> Point + Sync>;

fn test_function(f: TestFunction, model: &AttractorModel) -> (ScalarFn, GradFn) {
    use std::f64::consts::PI;
    let b = model.barycenter;
    let line = model.n() == 1;
    match f {
        TestFunction::One => (Box::new(|_| 1.0), Box::new(|_| Point::zeros())),
        TestFunction::X1 => (Box::new(|p| p.x), Box::new(|_| Point::new(1.0, 0.0))),
        TestFunction::SineBump if line => (
            Box::new(|p| (PI * p.x).sin()),
            Box::new(|p| Point::new(PI * (PI * p.x).cos(), 0.0)),
        ),
        TestFunction::SineBump => (
            Box::new(|p| (PI * p.x).sin() * (PI * p.y).sin()),
            Box::new(|p| Point::new(PI * (PI * p.x).cos() * (PI * p.y).sin(), PI * (PI * p.x).sin() * (PI * p.y).cos())),
        ),
        TestFunction::Gaussian => (
            Box::new(move |p| (-(p - b).norm_squared()).exp()),
            Box::new(move |p| (p - b) * (-2.0 * (-(p - b).norm_squared()).exp())),
        ),
    }
}

fn power_of_two_below(x: f64) -> f64 {
    2f64.powf(x.log2().floor())
}

fn raster(model: &AttractorModel, pixel: f64) -> Result<RasterImage> {
    if !(pixel > 0.0 && pixel.is_finite()) {
        return Err(CliError::validation("pixel", format!("{pixel} must be positive")));
    }
    Ok(rasterize_attractor(model, pixel)?)
}

fn ifs_echo(model: &AttractorModel) -> Value {
    json!({ "name": model.ifs.name, "n": model.n(), "maps": model.ifs.len() })
}

// ---------------------------------------------------------------- attractor

fn attractor_info(a: &InfoArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let ifs = &model.ifs;
    let info = json!({
        "name": ifs.name,
        "ambient_dim": ifs.ambient_dim,
        "maps": ifs.len(),
        "ratios": ifs.ratios().collect::<Vec<_>>(),
        "homogeneous": ifs.is_homogeneous(),
        "n_attractor": ifs.is_n_attractor(),
        "similarity_dimension": ifs.similarity_dimension(),
        "diameter": model.diameter,
        "measure": model.total_measure,
        "measure_declared": ifs.declared_measure.is_some(),
        "barycenter": model.barycenter,
        "bounding_ball": model.bounding_ball,
        "ifs": serde_json::from_str::<Value>(&fracscreen_core::ifs::io::serialize_ifs(ifs)).expect("valid json"),
    });
    out.write_json("attractor_info.json", &info)?;
    Ok(info)
}

fn attractor_mesh(a: &MeshCmdArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let param = mesh_parameter(&a.mesh)?;
    let mesh = match param {
        MeshParameter::Level(l) => fracscreen_core::generate_level_mesh(&model, l),
        MeshParameter::Diameter(h) => fracscreen_core::generate_diameter_mesh(&model, h)?,
    };
    out.write("mesh.csv", &mesh.to_csv(model.n()))?;
    Ok(json!({
        "attractor": ifs_echo(&model),
        "parameter": param,
        "cells": mesh.len(),
        "h": mesh.h(),
        "min_diameter": mesh.min_diameter(),
        "total_measure": mesh.total_measure(),
        "attractor_measure": model.measure(),
    }))
}

fn attractor_render(a: &RenderArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let pixel = a.pixel.unwrap_or_else(|| power_of_two_below(model.h0() / 256.0));
    let img = raster(&model, pixel)?;
    let mut csv = String::from("ix,iy,x,y,class\n");
    for iy in 0..img.ny {
        for ix in 0..img.nx {
            let c = img.class(ix, iy);
            if c == PixelClass::Outside {
                continue;
            }
            let p = img.center(ix, iy);
            let name = match c {
                PixelClass::Boundary => "boundary",
                PixelClass::Inside => "inside",
                _ => "unknown",
            };
            writeln!(csv, "{ix},{iy},{},{},{name}", jsonout::format_f64(p.x), jsonout::format_f64(p.y)).unwrap();
        }
    }
    out.write("render.csv", &csv)?;
    Ok(json!({
        "attractor": ifs_echo(&model),
        "pixel_size": pixel,
        "origin": img.origin,
        "nx": img.nx,
        "ny": img.ny,
        "inside_pixels": img.count(PixelClass::Inside),
        "boundary_pixels": img.count(PixelClass::Boundary),
        "measure_estimate": measure_from_raster(&img),
    }))
}

// ---------------------------------------------------------------- geometry

fn geom_dim(a: &DimArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    if a.j_max <= a.j_min {
        return Err(CliError::validation("j_max", "must exceed j_min"));
    }
    let img = raster(&model, a.pixel)?;
    let fit = boundary_box_dimension(&img, &dyadic_scales(a.j_min, a.j_max))?;
    let report = json!({
        "probe": "boundary_box_dimension",
        "params": { "pixel": a.pixel, "j_min": a.j_min, "j_max": a.j_max },
        "fit": fit,
    });
    out.write_json("dimension.json", &report)?;
    Ok(json!({ "attractor": ifs_echo(&model), "slope": fit.slope, "unstable": fit.unstable }))
}

fn geom_porosity(a: &PorosityArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let img = raster(&model, a.pixel)?;
    let sample_box = fracscreen_core::geometry::probes::ball_box(&model.bounding_ball, model.n());
    let report = porosity_probe(&img, sample_box, a.trials, (a.r_min, a.r_max), a.seed)?;
    out.write_json("porosity.json", &report)?;
    Ok(json!({ "attractor": ifs_echo(&model), "eta_min": report.eta_min, "failed": report.failed }))
}

fn geom_osc(a: &OscArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let img = raster(&model, a.pixel)?;
    let report = osc_and_overlap_probe(&model.ifs, &img, a.samples, a.seed);
    out.write_json("osc.json", &report)?;
    Ok(json!({ "attractor": ifs_echo(&model), "holds": report.holds, "max_overlap": report.max_overlap }))
}

fn probe_options(p: &ProbeArgs) -> IntegralProbeOptions {
    IntegralProbeOptions {
        centers: p.centers,
        samples: p.samples,
        seed: p.seed,
    }
}

fn geom_dt(a: &DtArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let img = raster(&model, a.probe.pixel)?;
    let report = dt_class_probe(&img, a.t, &a.probe.radii, &probe_options(&a.probe))?;
    out.write_json("dt.json", &report)?;
    Ok(json!({ "attractor": ifs_echo(&model), "slope": report.slope, "verdict": report.verdict }))
}

fn geom_aikawa(a: &AikawaArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, false)?;
    let img = raster(&model, a.probe.pixel)?;
    let report = aikawa_integral_probe(&img, a.s, &a.probe.radii, &probe_options(&a.probe))?;
    out.write_json("aikawa.json", &report)?;
    Ok(json!({ "attractor": ifs_echo(&model), "slope": report.slope, "verdict": report.verdict }))
}

// ---------------------------------------------------------------- approximation

fn approx_project(a: &ProjectArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, true)?;
    let param = mesh_parameter(&a.mesh)?;
    let mesh = match param {
        MeshParameter::Level(l) => fracscreen_core::generate_level_mesh(&model, l),
        MeshParameter::Diameter(h) => fracscreen_core::generate_diameter_mesh(&model, h)?,
    };
    if !(a.quad_rel > 0.0 && a.quad_rel <= 1.0) {
        return Err(CliError::validation("quad_rel", format!("{} is not in (0, 1]", a.quad_rel)));
    }
    let h_q = a.quad_rel * mesh.h();
    let (f, grad) = test_function(a.function, &model);
    let fc = |p: &Point| Complex64::new(f(p), 0.0);
    let q = l2_project(&model, &mesh, fc, h_q);
    let error = l2_error(&model, &q, fc, h_q);
    let f_norm = l2_norm_of(&model, fc, h_q);
    let poincare = poincare_bound_check(&model, &mesh, &f, &grad, h_q);

    let mut csv = String::from("index;coefficient\n");
    for (c, v) in mesh.cells.iter().zip(&q.coefficients) {
        writeln!(csv, "{};{}", c.index, jsonout::format_f64(v.re)).unwrap();
    }
    out.write("projection.csv", &csv)?;
    let report = json!({
        "attractor": ifs_echo(&model),
        "function": a.function,
        "cells": mesh.len(),
        "h": mesh.h(),
        "quadrature_h": h_q,
        "l2_error": error,
        "f_norm": f_norm,
        "poincare": poincare,
    });
    out.write_json("projection.json", &report)?;
    Ok(report)
}

fn approx_converge(a: &ApproxConvergeArgs, out: &mut Outputs) -> Result<Value> {
    let model = load_model(&a.source, true)?;
    let (f, _) = test_function(a.function, &model);
    let study = projection_convergence_study(&model, |p| Complex64::new(f(p), 0.0), a.s1, a.s2, &a.h_list, a.grid)?;
    out.write("approx_study.csv", &study.to_csv())?;
    out.write_json("approx_study.json", &study)?;
    Ok(json!({
        "attractor": ifs_echo(&model),
        "slope": study.slope(),
        "expected_slope": study.expected_slope,
        "note": study.note,
    }))
}

// ---------------------------------------------------------------- BEM

fn scattering(source: &Source, wave: &WaveArgs, mesh: MeshParameter) -> Result<ScatteringConfig> {
    let model = load_model(source, true)?;
    let w = incident_wave(&model, wave)?;
    Ok(ScatteringConfig::new(model, w, mesh)?)
}

fn bem_solve(a: &BemSolveArgs, out: &mut Outputs) -> Result<Value> {
    let cfg = scattering(&a.source, &a.wave, mesh_parameter(&a.mesh)?)?;
    let system = assemble(&cfg)?;
    let sol = solve(&system)?;
    let functional = load_functional(&system, &sol);
    let solution = json!({
        "attractor": ifs_echo(&cfg.model),
        "mesh": { "parameter": cfg.mesh, "cells": sol.len(), "h": sol.mesh.h() },
        "wave": cfg.wave,
        "indices": sol.mesh.cells.iter().map(|c| c.index.to_string()).collect::<Vec<_>>(),
        "coefficients": sol.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "density": sol.density.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "residual": sol.residual,
        "quadrature_error_max": sol.max_entry_error,
        "functional": [functional.re, functional.im],
    });
    let name = a.out.display().to_string();
    out.write_json(&name, &solution)?;
    Ok(json!({
        "cells": sol.len(),
        "residual": sol.residual,
        "quadrature_error_max": sol.max_entry_error,
        "functional": [functional.re, functional.im],
        "table_size": system.table_size,
        "near_pairs": system.near_pairs,
    }))
}

fn bem_converge(a: &BemConvergeArgs, out: &mut Outputs) -> Result<Value> {
    let (meshes, default_ref) = match (&a.h_list, &a.levels) {
        (Some(hs), None) => {
            let h_min = hs.iter().cloned().fold(f64::INFINITY, f64::min);
            (hs.iter().map(|&h| MeshParameter::Diameter(h)).collect::<Vec<_>>(), MeshParameter::Diameter(h_min / 4.0))
        }
        (None, Some(ls)) => {
            let l_max = ls.iter().copied().max().unwrap_or(0);
            (ls.iter().map(|&l| MeshParameter::Level(l)).collect(), MeshParameter::Level(l_max + 2))
        }
        _ => return Err(CliError::validation("meshes", "give exactly one of --h-list and --levels")),
    };
    let reference = match (a.reference_h, a.reference_level) {
        (Some(h), _) => MeshParameter::Diameter(h),
        (None, Some(l)) => MeshParameter::Level(l),
        (None, None) => default_ref,
    };
    let cfg = scattering(&a.source, &a.wave, meshes[0])?;
    let opts = BemStudyOptions {
        meshes,
        reference,
        far_points: None,
        grid_spacing: a.grid,
        field_rule: FieldRule::default(),
    };
    let study = convergence_study(&cfg, &opts)?;
    out.write("bem_study.csv", &study.to_csv())?;
    out.write_json("bem_study.json", &study)?;
    let slope = |f: &Option<fracscreen_core::fit::LineFit>| f.map(|f| f.slope);
    Ok(json!({
        "attractor": ifs_echo(&cfg.model),
        "reference_cells": study.reference_cells,
        "energy_slope": slope(&study.energy_fit),
        "functional_slope": slope(&study.functional_fit),
        "field_slope": slope(&study.field_fit),
        "non_monotone": study.non_monotone,
    }))
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn bem_field(a: &BemFieldArgs, out: &mut Outputs) -> Result<Value> {
    if a.grid.len() != 3 || a.grid.contains(&0) {
        return Err(CliError::validation("grid", "expected three positive counts nx,ny,nz"));
    }
    if a.bbox.len() != 6 || a.bbox.iter().any(|v| !v.is_finite()) {
        return Err(CliError::validation("box", "expected six finite numbers x0,x1,y0,y1,z0,z1"));
    }
    let rule = match a.rule {
        RuleKind::Adaptive => FieldRule::default(),
        RuleKind::Fixed => {
            if !(a.h_rel > 0.0 && a.h_rel <= 1.0) {
                return Err(CliError::validation("h_rel", format!("{} is not in (0, 1]", a.h_rel)));
            }
            FieldRule::Fixed { h_rel: a.h_rel }
        }
    };
    let cfg = scattering(&a.source, &a.wave, mesh_parameter(&a.mesh)?)?;
    let sol = solve(&assemble(&cfg)?)?;
    let b = &a.bbox;
    let (xs, ys, zs) = (axis(b[0], b[1], a.grid[0]), axis(b[2], b[3], a.grid[1]), axis(b[4], b[5], a.grid[2]));
    let mut points = Vec::with_capacity(xs.len() * ys.len() * zs.len());
    for &z in &zs {
        for &y in &ys {
            for &x in &xs {
                points.push([x, y, z]);
            }
        }
    }
    let u = evaluate_field_many(&cfg.model, &sol, &points, rule)?;
    let mut csv = String::from("x,y,z,re_u,im_u,abs_u\n");
    for (p, v) in points.iter().zip(&u) {
        let f = jsonout::format_f64;
        writeln!(csv, "{},{},{},{},{},{}", f(p[0]), f(p[1]), f(p[2]), f(v.re), f(v.im), f(v.norm())).unwrap();
    }
    out.write("field.csv", &csv)?;
    Ok(json!({
        "attractor": ifs_echo(&cfg.model),
        "cells": sol.len(),
        "points": points.len(),
        "residual": sol.residual,
        "max_abs_u": u.iter().map(|v| v.norm()).fold(0.0, f64::max),
    }))
}
