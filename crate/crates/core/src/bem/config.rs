//! Scattering problem setup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{generate_diameter_mesh, generate_level_mesh, AttractorModel, FractalMesh, MeshParameter};
use crate::kernels::{HelmholtzKernel, IncidentPlaneWave, Wavenumber};
use crate::quadrature::TableOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureParams {
    /// Pairs with ball gap `>= eta · max diameter` are separated.
    pub eta: f64,
    /// Separated pairs use sub-cells of diameter `<= sigma · distance`.
    pub sigma: f64,
    /// Relative sub-cell size for the smooth remainder on near pairs.
    pub near_rel: f64,
    /// Relative sub-cell size for the right-hand side.
    pub rhs_rel: f64,
    pub table: TableOptions,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self {
            eta: 1.0,
            sigma: 0.25,
            near_rel: 0.25,
            rhs_rel: 0.25,
            table: TableOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringConfig {
    pub model: AttractorModel,
    pub wave: IncidentPlaneWave,
    pub mesh: MeshParameter,
    pub quadrature: QuadratureParams,
}

impl ScatteringConfig {
    pub fn new(model: AttractorModel, wave: IncidentPlaneWave, mesh: MeshParameter) -> Result<Self> {
        let n = model.n();
        if wave.n != n {
            return Err(Error::invalid("wave", format!("wave for n = {} on a screen with n = {n}", wave.n)));
        }
        if let MeshParameter::Diameter(h) = mesh {
            if !(h > 0.0 && h <= model.h0() * (1.0 + 1e-12)) {
                return Err(Error::invalid("h", format!("{h} is not in (0, h0 = {}]", model.h0())));
            }
        }
        Ok(Self {
            model,
            wave,
            mesh,
            quadrature: QuadratureParams::default(),
        })
    }

    /// Normal incidence at wavenumber `k` on an `h`-mesh.
    pub fn normal_incidence(model: AttractorModel, k: f64, mesh: MeshParameter) -> Result<Self> {
        let wave = IncidentPlaneWave::normal(Wavenumber::new(k)?, model.n())?;
        Self::new(model, wave, mesh)
    }

    pub fn kernel(&self) -> HelmholtzKernel {
        HelmholtzKernel {
            n: self.model.n(),
            k: self.wave.k,
        }
    }

    pub fn build_mesh(&self) -> Result<FractalMesh> {
        match self.mesh {
            MeshParameter::Level(l) => Ok(generate_level_mesh(&self.model, l)),
            MeshParameter::Diameter(h) => generate_diameter_mesh(&self.model, h),
        }
    }

    pub fn with_mesh(&self, mesh: MeshParameter) -> Result<Self> {
        let mut c = Self::new(self.model.clone(), self.wave, mesh)?;
        c.quadrature = self.quadrature;
        Ok(c)
    }
}
