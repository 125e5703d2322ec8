//! Helmholtz kernels, Bessel functions and incident waves.

pub mod bessel;
pub mod helmholtz;
pub mod incident;

pub use bessel::{hankel0_first_kind, hankel1_first_kind, EULER_GAMMA};
pub use helmholtz::{fundamental_solution, kernel_split, phi_points, HelmholtzKernel, SingularPart, Wavenumber};
pub use incident::{incident_trace, IncidentPlaneWave};
