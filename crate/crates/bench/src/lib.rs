//! Shared fixtures for the benchmarks.

use fracscreen_core::bem::ScatteringConfig;
use fracscreen_core::{library, AttractorModel, MeshParameter};

pub fn square() -> AttractorModel {
    AttractorModel::new(library::unit_square()).expect("library attractor")
}

pub fn snowflake() -> AttractorModel {
    AttractorModel::new(library::koch_snowflake()).expect("library attractor")
}

/// Normal incidence at `k = 5` on a uniform mesh.
pub fn scattering(model: AttractorModel, level: usize) -> ScatteringConfig {
    ScatteringConfig::normal_incidence(model, 5.0, MeshParameter::Level(level)).expect("valid config")
}

/// `n` points spread logarithmically over `[lo, hi]`.
pub fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}
