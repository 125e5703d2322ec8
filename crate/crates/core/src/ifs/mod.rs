//! Iterated function systems of contracting similarities, their attractors,
//! and the multi-index meshes built from them.

pub mod attractor;
pub mod io;
pub mod library;
pub mod mesh;
pub mod similarity;
pub mod system;

pub use attractor::{AttractorModel, Ball, Bounded, ModelOptions};
pub use mesh::{generate_diameter_mesh, generate_level_mesh, Cell, FractalMesh, MeshParameter, MultiIndex};
pub use similarity::{Point, SimilarityMap};
pub use system::{similarity_dimension, IteratedFunctionSystem};
