//! Fractal screens generated by iterated function systems of similarities,
//! piecewise-constant approximation on their self-similar meshes, and a
//! Galerkin boundary element solver for sound-soft Helmholtz scattering.

pub mod approx;
pub mod bem;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod ifs;
pub mod kernels;
pub mod quadrature;

pub use error::{Error, Result};
pub use ifs::{
    generate_diameter_mesh, generate_level_mesh, library, AttractorModel, Cell, FractalMesh, IteratedFunctionSystem, MeshParameter, MultiIndex,
    Point, SimilarityMap,
};
