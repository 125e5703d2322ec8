//! Piecewise-constant approximation on fractal meshes and the norms used to
//! measure it.

pub mod grid;
pub mod poincare;
pub mod projection;
pub mod sobolev;
pub mod study;

pub use grid::{deposit_function, deposit_piecewise_constant, GridField};
pub use poincare::{poincare_bound_check, poincare_constant, PoincareReport};
pub use projection::{l2_error, l2_norm_of, l2_project, l2_project_real, PiecewiseConstant};
pub use sobolev::fractional_sobolev_norm;
pub use study::{projection_convergence_study, ProjectionStudy, StudyRow};
