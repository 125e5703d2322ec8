//! Composite barycenter rules on attractor cells.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::ifs::mesh::root_rule;
use crate::ifs::{AttractorModel, Cell, Point, SimilarityMap};

/// Nodes are barycenters of a sub-mesh of the cell, weights its measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRule {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub h_q: f64,
}

impl CellRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<T, F>(&self, f: F) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(&Point) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (x, &w)| acc + f(x) * w)
    }
}

/// Sub-decomposition `L_{h_q}` of a cell's subtree. When `h_q` is at least
/// the cell diameter the rule has the single node at the cell barycenter.
pub fn cell_rule(model: &AttractorModel, cell: &Cell, h_q: f64) -> CellRule {
    let template = root_rule(model, h_q / cell.diameter);
    map_template(&template, &cell.map, model.n(), h_q)
}

fn map_template(template: &[(Point, f64)], map: &SimilarityMap, n: usize, h_q: f64) -> CellRule {
    let scale = map.rho.powi(n as i32);
    CellRule {
        nodes: template.iter().map(|(p, _)| map.apply(p)).collect(),
        weights: template.iter().map(|(_, w)| w * scale).collect(),
        h_q,
    }
}

/// `∫_cell f` by the composite barycenter rule with sub-cells of diameter
/// at most `h_q`.
pub fn integrate_on_cell<T, F>(model: &AttractorModel, cell: &Cell, f: F, h_q: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&Point) -> T,
{
    cell_rule(model, cell, h_q).apply(f)
}

/// Shared root templates indexed by relative size, quantized to quarter
/// octaves so that nearby requests reuse one template.
#[derive(Debug)]
pub struct RuleCache {
    model: AttractorModel,
    templates: RwLock<HashMap<i32, Arc<Vec<(Point, f64)>>>>,
    levels: RwLock<HashMap<usize, Arc<Vec<(Point, f64)>>>>,
}

impl RuleCache {
    pub fn new(model: &AttractorModel) -> Self {
        Self {
            model: model.clone(),
            templates: RwLock::new(HashMap::new()),
            levels: RwLock::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &AttractorModel {
        &self.model
    }

    /// Quantization step: `h_rel` is rounded down to `2^{-q/4}`.
    fn quantize(h_rel: f64) -> i32 {
        if h_rel >= 1.0 {
            0
        } else {
            (-4.0 * h_rel.log2()).ceil().min(200.0) as i32
        }
    }

    /// Root template whose sub-cells have diameter at most `h_rel · h0`.
    pub fn template(&self, h_rel: f64) -> Arc<Vec<(Point, f64)>> {
        let q = Self::quantize(h_rel);
        if let Some(t) = self.templates.read().unwrap().get(&q) {
            return t.clone();
        }
        let t = Arc::new(root_rule(&self.model, 2f64.powf(-q as f64 / 4.0)));
        self.templates.write().unwrap().entry(q).or_insert(t).clone()
    }

    /// Rule on the cell `map(Γ)` with sub-cells of relative size `h_rel`.
    pub fn rule(&self, map: &SimilarityMap, h_rel: f64) -> CellRule {
        let t = self.template(h_rel);
        map_template(&t, map, self.model.n(), h_rel * map.rho * self.model.h0())
    }

    /// Level-`l` template of a homogeneous system.
    fn level_template(&self, l: usize) -> Arc<Vec<(Point, f64)>> {
        if let Some(t) = self.levels.read().unwrap().get(&l) {
            return t.clone();
        }
        let rho = self.model.ifs.rho_max();
        let t = Arc::new(root_rule(&self.model, rho.powi(l as i32) * (1.0 + 1e-9)));
        self.levels.write().unwrap().entry(l).or_insert(t).clone()
    }

    /// `∫_{A(Γ)} ∫_{B(Γ)} f(|x − y|)` for a well-separated pair by a tensor
    /// barycenter rule with sub-cells of diameter about `rel · dist`.
    ///
    /// Returns `(value, alternative)`; their difference is the error
    /// estimate. On homogeneous systems the barycenter rule has an error
    /// expansion in even powers of the uniform sub-cell ratio, so `value` is
    /// the Richardson extrapolation of two consecutive levels and
    /// `alternative` the finer of them. Otherwise `value` uses `rel` and
    /// `alternative` uses `2 rel`.
    pub fn separated_pair<T, F>(&self, a: &SimilarityMap, b: &SimilarityMap, dist: f64, rel: f64, f: F) -> (T, T)
    where
        T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let h0 = self.model.h0();
        let n = self.model.n();
        let tensor = |ra: &CellRule, rb: &CellRule| {
            let mut s = T::default();
            for (x, &wx) in ra.nodes.iter().zip(&ra.weights) {
                let mut inner = T::default();
                for (y, &wy) in rb.nodes.iter().zip(&rb.weights) {
                    inner = inner + f((x - y).norm()) * wy;
                }
                s = s + inner * wx;
            }
            s
        };
        if self.model.ifs.is_homogeneous() {
            let rho = self.model.ifs.rho_max();
            let level = |m: &SimilarityMap| {
                let h_rel = rel * dist / (m.rho * h0);
                if h_rel >= 1.0 {
                    0
                } else {
                    (h_rel.ln() / rho.ln() - 1e-9).ceil() as usize
                }
            };
            let (mut la, mut lb) = (level(a), level(b));
            if la == 0 || lb == 0 {
                la += 1;
                lb += 1;
            }
            let on = |m: &SimilarityMap, l: usize| {
                map_template(&self.level_template(l), m, n, rho.powi(l as i32) * m.rho * h0)
            };
            let fine = tensor(&on(a, la), &on(b, lb));
            let coarse = tensor(&on(a, la - 1), &on(b, lb - 1));
            let r2 = rho * rho;
            ((fine - coarse * r2) * (1.0 / (1.0 - r2)), fine)
        } else {
            let eval = |rel: f64| {
                let ha = (rel * dist / (a.rho * h0)).min(1.0);
                let hb = (rel * dist / (b.rho * h0)).min(1.0);
                tensor(&self.rule(a, ha), &self.rule(b, hb))
            };
            (eval(rel), eval(2.0 * rel))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{generate_diameter_mesh, library};

    #[test]
    fn constants_integrate_to_measure() {
        for ifs in library::all() {
            let model = AttractorModel::new(ifs).unwrap();
            let mesh = generate_diameter_mesh(&model, model.h0() / 3.0).unwrap();
            for cell in mesh.cells.iter().take(5) {
                let v: f64 = integrate_on_cell(&model, cell, |_| 1.0, cell.diameter / 5.0);
                assert!((v - cell.measure).abs() <= 1e-12 * cell.measure);
            }
        }
    }

    #[test]
    fn affine_exact_on_square() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let root = Cell::root(&model);
        for h in [1.0, 0.3, 0.05] {
            let v: f64 = integrate_on_cell(&model, &root, |p| p.x, h);
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_h_is_single_node() {
        let model = AttractorModel::new(library::koch_snowflake()).unwrap();
        let root = Cell::root(&model);
        let r = cell_rule(&model, &root, 10.0);
        assert_eq!(r.len(), 1);
        assert_eq!(r.nodes[0], model.barycenter);
    }

    #[test]
    fn cache_reuses_templates() {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let cache = RuleCache::new(&model);
        let a = cache.template(0.2);
        let b = cache.template(0.19);
        assert!(Arc::ptr_eq(&a, &b));
        let w: f64 = a.iter().map(|p| p.1).sum();
        assert!((w - 1.0).abs() < 1e-12);
        assert!(a.len() >= 16);
    }

    #[test]
    fn extrapolated_separated_pair() {
        // ∫_{[0,1]} ∫_{[2,3]} (y − x)^{-1} = 3 ln 3 − 4 ln 2
        let model = AttractorModel::new(library::unit_interval()).unwrap();
        let cache = RuleCache::new(&model);
        let b = SimilarityMap { translation: Point::new(2.0, 0.0), ..SimilarityMap::identity() };
        let exact = 3.0 * 3f64.ln() - 4.0 * 2f64.ln();
        let (v, alt): (f64, f64) = cache.separated_pair(&SimilarityMap::identity(), &b, 2.0, 1.0 / 16.0, |r| 1.0 / r);
        assert!((v - exact).abs() < 1e-5, "{v} vs {exact}");
        assert!((alt - exact).abs() > 10.0 * (v - exact).abs(), "{alt}");
    }
}
