//! Galerkin boundary element method for sound-soft scattering by a screen.

pub mod assemble;
pub mod config;
pub mod field;
pub mod solve;
pub mod study;

pub use assemble::{assemble, assemble_on_mesh, near_pair_seeds, near_pair_tables, GalerkinSystem, PairIntegrator};
pub use config::{QuadratureParams, ScatteringConfig};
pub use field::{evaluate_field, evaluate_field_many, FieldRule};
pub use solve::{solve, DensitySolution};
pub use study::{convergence_study, default_far_points, load_functional, BemStudy, BemStudyOptions, BemStudyRow};
