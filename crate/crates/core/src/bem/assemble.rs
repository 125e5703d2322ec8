//! Galerkin matrix and load vector for the single-layer equation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{QuadratureParams, ScatteringConfig};
use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, FractalMesh, SimilarityMap};
use crate::kernels::{HelmholtzKernel, SingularPart};
use crate::quadrature::{center_distance, classify_maps, PairClass, RuleCache, SelfSimilarTable, StaticKernel};

/// `A c = b` in the basis `|Ω_i|^{-1/2} χ_{Ω_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinSystem {
    pub mesh: FractalMesh,
    pub kernel: HelmholtzKernel,
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    /// Quadrature error estimate of each (normalized) entry.
    pub entry_errors: DMatrix<f64>,
    pub measures: Vec<f64>,
    pub near_pairs: usize,
    pub table_size: usize,
}

impl GalerkinSystem {
    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn max_entry_error(&self) -> f64 {
        self.entry_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates `∫_{A(Γ)} ∫_{B(Γ)} Φ` for cell pairs.
pub struct PairIntegrator<'a> {
    model: &'a AttractorModel,
    kernel: HelmholtzKernel,
    rules: &'a RuleCache,
    table: &'a SelfSimilarTable,
    cone: Option<&'a SelfSimilarTable>,
    params: QuadratureParams,
    singular: SingularPart,
}

impl<'a> PairIntegrator<'a> {
    pub fn new(
        model: &'a AttractorModel,
        kernel: HelmholtzKernel,
        rules: &'a RuleCache,
        table: &'a SelfSimilarTable,
        cone: Option<&'a SelfSimilarTable>,
        params: QuadratureParams,
    ) -> Self {
        Self {
            model,
            kernel,
            rules,
            table,
            cone,
            params,
            singular: kernel.singular(),
        }
    }

    /// Static kernel whose table supplies the singular part of `Φ`.
    pub fn static_kernel(kernel: &HelmholtzKernel) -> StaticKernel {
        match kernel.singular() {
            SingularPart::Power { t, .. } => StaticKernel::Power(t),
            SingularPart::Log { .. } => StaticKernel::Log,
        }
    }

    /// Coefficient `c` of the `c |x − y|` term of the remainder that the
    /// cone table integrates exactly (`n = 2` only).
    pub fn cone_coefficient(kernel: &HelmholtzKernel) -> f64 {
        if kernel.n == 2 {
            -kernel.k * kernel.k / (8.0 * std::f64::consts::PI)
        } else {
            0.0
        }
    }

    /// Value and error estimate of the pair integral.
    pub fn integrate(&self, a: &SimilarityMap, b: &SimilarityMap) -> (Complex64, f64) {
        match classify_maps(self.model, a, b, self.params.eta) {
            PairClass::Separated => self.separated(a, b),
            _ => self.near(a, b).unwrap_or_else(|| self.separated(a, b)),
        }
    }

    fn near(&self, a: &SimilarityMap, b: &SimilarityMap) -> Option<(Complex64, f64)> {
        let (s, se) = self.table.pair_value(a, b)?;
        let c = match self.singular {
            SingularPart::Power { coefficient, .. } | SingularPart::Log { coefficient } => coefficient,
        };
        let k = &self.kernel;
        let (cone, cc) = match self.cone {
            Some(t) => (t.pair_value(a, b)?, Self::cone_coefficient(k)),
            None => ((0.0, 0.0), 0.0),
        };
        let tensor = |rel: f64| {
            let (ra, rb) = (self.rules.rule(a, rel), self.rules.rule(b, rel));
            let mut sum = Complex64::default();
            for (x, &wx) in ra.nodes.iter().zip(&ra.weights) {
                let mut inner = Complex64::default();
                for (y, &wy) in rb.nodes.iter().zip(&rb.weights) {
                    let r = (x - y).norm();
                    inner += (k.remainder(r) - cc * r) * wy;
                }
                sum += inner * wx;
            }
            sum
        };
        let rel = self.params.near_rel;
        let (r, rc) = (tensor(rel), tensor(2.0 * rel));
        Some((r + c * s + cc * cone.0, (r - rc).norm() + c.abs() * se + cc.abs() * cone.1))
    }

    fn separated(&self, a: &SimilarityMap, b: &SimilarityMap) -> (Complex64, f64) {
        let h0 = self.model.h0();
        let n = self.model.n() as i32;
        let dist = center_distance(self.model, a, b);
        let (da, db) = (a.rho * h0, b.rho * h0);
        let sigma = self.params.sigma;
        let k = &self.kernel;
        if da.max(db) <= sigma * dist {
            let x = a.apply(&self.model.barycenter);
            let y = b.apply(&self.model.barycenter);
            let mu = a.rho.powi(n) * b.rho.powi(n) * self.model.measure().powi(2);
            let v = k.phi((x - y).norm());
            // second-order Taylor term of the one-point rule: Hessian of Φ
            // at the center distance times second moments <= (diam/2)²
            let r = (x - y).norm();
            let hess = v.norm() * (k.k * k.k + 2.0 * k.k / r + 2.0 / (r * r));
            let moments = 0.25 * (da * da + db * db);
            return (v * mu, 0.5 * hess * moments * mu);
        }
        let (v, alt) = self.rules.separated_pair(a, b, dist, sigma, |r| k.phi(r));
        (v, (v - alt).norm())
    }
}

/// Relative configurations `A^{-1} B` (larger cell first) of all near
/// pairs, without exact repeats, and the number of near pairs.
pub fn near_pair_seeds(model: &AttractorModel, maps: &[SimilarityMap], eta: f64) -> (Vec<SimilarityMap>, usize) {
    let seeds: Vec<Vec<SimilarityMap>> = (0..maps.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in i + 1..maps.len() {
                if classify_maps(model, &maps[i], &maps[j], eta) == PairClass::Near {
                    let (big, small) = if maps[i].rho >= maps[j].rho { (i, j) } else { (j, i) };
                    out.push(maps[big].inverse().compose(&maps[small]));
                }
            }
            out
        })
        .collect();
    let near = seeds.iter().map(Vec::len).sum();
    let mut flat: Vec<SimilarityMap> = seeds.into_iter().flatten().collect();
    flat.sort_by(|p, q| {
        let key = |m: &SimilarityMap| [m.rho, m.translation.x, m.translation.y, m.orthogonal[(0, 0)], m.orthogonal[(0, 1)]];
        key(p).partial_cmp(&key(q)).unwrap_or(std::cmp::Ordering::Equal)
    });
    flat.dedup_by(|p, q| {
        (p.rho - q.rho).abs() < 1e-12
            && (p.translation - q.translation).amax() < 1e-12 * model.h0()
            && (p.orthogonal - q.orthogonal).amax() < 1e-12
    });
    (flat, near)
}

/// Singular-part table and, for `n = 2`, the cone table.
pub fn near_pair_tables(
    model: &AttractorModel,
    rules: &RuleCache,
    kernel: &HelmholtzKernel,
    seeds: &[SimilarityMap],
    params: &QuadratureParams,
) -> Result<(SelfSimilarTable, Option<SelfSimilarTable>)> {
    let table = SelfSimilarTable::build(model, rules, PairIntegrator::static_kernel(kernel), seeds, params.table)?;
    let cone = if kernel.n == 2 {
        Some(SelfSimilarTable::build(model, rules, StaticKernel::Power(-1.0), seeds, params.table)?)
    } else {
        None
    };
    Ok((table, cone))
}

pub fn assemble(config: &ScatteringConfig) -> Result<GalerkinSystem> {
    let mesh = config.build_mesh()?;
    assemble_on_mesh(config, mesh)
}

pub fn assemble_on_mesh(config: &ScatteringConfig, mesh: FractalMesh) -> Result<GalerkinSystem> {
    let model = &config.model;
    let kernel = config.kernel();
    let params = config.quadrature;
    let rules = RuleCache::new(model);
    let maps: Vec<SimilarityMap> = mesh.cells.iter().map(|c| c.map).collect();
    let (seeds, near_pairs) = near_pair_seeds(model, &maps, params.eta);
    let (table, cone) = near_pair_tables(model, &rules, &kernel, &seeds, &params)?;
    let integ = PairIntegrator::new(model, kernel, &rules, &table, cone.as_ref(), params);
    let measures: Vec<f64> = mesh.cells.iter().map(|c| c.measure).collect();
    let scale: Vec<f64> = measures.iter().map(|m| 1.0 / m.sqrt()).collect();
    let n = maps.len();

    let rows: Vec<Vec<(Complex64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| integ.integrate(&maps[i], &maps[j])).collect())
        .collect();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    let mut entry_errors = DMatrix::<f64>::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, (v, e)) in row.into_iter().enumerate() {
            let j = i + off;
            let s = scale[i] * scale[j];
            let v = v * s;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical(format!("matrix entry ({i}, {j}) is not finite")));
            }
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
            entry_errors[(i, j)] = e * s;
            entry_errors[(j, i)] = e * s;
        }
    }

    let wave = &config.wave;
    let rhs = DVector::from_iterator(
        n,
        maps.iter().zip(&scale).map(|(m, s)| {
            let r = rules.rule(m, params.rhs_rel);
            r.apply(|x| wave.on_plane(x)) * *s
        }),
    );
    Ok(GalerkinSystem {
        mesh,
        kernel,
        matrix,
        rhs,
        entry_errors,
        measures,
        near_pairs,
        table_size: table.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{library, MeshParameter};
    use rand::{Rng, SeedableRng};

    fn square_config(k: f64, level: usize) -> ScatteringConfig {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        ScatteringConfig::normal_incidence(model, k, MeshParameter::Level(level)).unwrap()
    }

    #[test]
    fn symmetric_and_normal_rhs() {
        let sys = assemble(&square_config(5.0, 2)).unwrap();
        assert_eq!(sys.matrix, sys.matrix.transpose());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (i, j) = (rng.gen_range(0..16), rng.gen_range(0..16));
            assert_eq!(sys.matrix[(i, j)].re.to_bits(), sys.matrix[(j, i)].re.to_bits());
        }
        for (b, m) in sys.rhs.iter().zip(&sys.measures) {
            assert!((b - Complex64::new(m.sqrt(), 0.0)).norm() < 1e-14);
        }
        assert!(sys.max_entry_error() < 1e-2 * sys.matrix[(0, 0)].norm());
    }

    #[test]
    fn single_cell_entry_is_table_value() {
        let sys = assemble(&square_config(1.0, 0)).unwrap();
        // |Γ|^{-1}∫∫Φ = (1/4π)·2.9732... + remainder part
        let exact_static = (4.0 * (1.0 + 2f64.sqrt()).ln() - 4.0 / 3.0 * (2f64.sqrt() - 1.0)) / (4.0 * std::f64::consts::PI);
        let a = sys.matrix[(0, 0)];
        // the remainder (e^{ir} − 1)/(4πr) has imaginary part in (sin 1.42/1.42, 1)/(4π)
        assert!(a.re < exact_static && a.re > exact_static - 0.1);
        assert!(a.im > 0.0 && a.im < 1.0 / (4.0 * std::f64::consts::PI));
    }
}
