//! Exact self-similar reduction of weakly singular double integrals.
//!
//! For cells `A(Γ)` and `B(Γ)` the substitution `x = A u`, `y = B v` gives
//! `∫∫ |x−y|^{-t} = ρ_A^{2n−t} J(A^{-1}B)` with
//! `J(T) = ∫_Γ ∫_{T(Γ)} |u−y|^{-t}`. Subdividing the larger of `Γ` and
//! `T(Γ)` (both when equal) expresses each `J(T)` through the `J` of
//! relative configurations one level down. Separated configurations are
//! evaluated by a tensor barycenter rule; the remaining ones form a finite
//! linear system that is solved exactly. The logarithmic kernel obeys the
//! same recursion with additive `ln ρ` terms.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::rule::RuleCache;
use crate::error::{Error, Result};
use crate::ifs::{AttractorModel, SimilarityMap};

/// Weakly singular static kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StaticKernel {
    /// `|x − y|^{-t}` with `-2 <= t < n`; negative `t` gives the smooth
    /// cone kernels `|x − y|^{|t|}`.
    Power(f64),
    /// `ln |x − y|`.
    Log,
}

impl StaticKernel {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            StaticKernel::Power(t) if t == 1.0 => 1.0 / r,
            StaticKernel::Power(t) => r.powf(-t),
            StaticKernel::Log => r.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableOptions {
    /// Configurations with ball gap `>= eta · max diameter` are separated.
    pub eta: f64,
    /// Separated configurations use sub-cells of diameter `<= sep_rel · distance`.
    pub sep_rel: f64,
    pub max_configs: usize,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            eta: 1.0,
            sep_rel: 1.0 / 16.0,
            max_configs: 20_000,
        }
    }
}

const RATIO_TOL: f64 = 1e-9;

type Key = [i64; 7];

fn config_key(t: &SimilarityMap, h0: f64) -> Key {
    let q = |v: f64| (v * 1e8).round() as i64;
    let o = &t.orthogonal;
    [
        q(t.rho),
        q(o[(0, 0)]),
        q(o[(0, 1)]),
        q(o[(1, 0)]),
        q(o[(1, 1)]),
        q(t.translation.x / h0),
        q(t.translation.y / h0),
    ]
}

/// `J(C) = scale · J(T) + shift`.
#[derive(Debug, Clone, Copy)]
struct Affine {
    scale: f64,
    shift: f64,
}

/// Solved table of `J` over the non-separated configurations.
#[derive(Debug, Clone)]
pub struct SelfSimilarTable {
    pub kernel: StaticKernel,
    pub options: TableOptions,
    n: usize,
    h0: f64,
    measure: f64,
    ball_radius: f64,
    ball_center: crate::ifs::Point,
    index: HashMap<Key, usize>,
    pub configs: Vec<SimilarityMap>,
    pub values: Vec<f64>,
    /// Change of each value when the separated terms use the alternative
    /// rule of [`RuleCache::separated_pair`].
    pub errors: Vec<f64>,
}

impl SelfSimilarTable {
    /// Builds the closure of the coincident configuration and `seeds` (each a
    /// relative map `A^{-1} B` of a cell pair).
    pub fn build(
        model: &AttractorModel,
        rules: &RuleCache,
        kernel: StaticKernel,
        seeds: &[SimilarityMap],
        options: TableOptions,
    ) -> Result<Self> {
        let n = model.n();
        if let StaticKernel::Power(t) = kernel {
            if !(t >= -2.0 && t < n as f64) {
                return Err(Error::invalid("t", format!("{t} is not in [-2, {n})")));
            }
            let s: f64 = model.ifs.ratios().map(|r| r.powf(2.0 * n as f64 - t)).sum();
            if s >= 1.0 {
                return Err(Error::invalid("t", "kernel is not integrable on the attractor"));
            }
        }
        let mut table = SelfSimilarTable {
            kernel,
            options,
            n,
            h0: model.h0(),
            measure: model.measure(),
            ball_radius: model.bounding_ball.radius,
            ball_center: model.bounding_ball.center,
            index: HashMap::new(),
            configs: Vec::new(),
            values: Vec::new(),
            errors: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for s in std::iter::once(SimilarityMap::identity()).chain(seeds.iter().copied()) {
            let s = if s.rho > 1.0 + RATIO_TOL { s.inverse() } else { s };
            if table.separated(&s) {
                continue;
            }
            let (c, _) = table.normalize(&s);
            table.intern(c, &mut queue);
        }

        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut known: Vec<f64> = Vec::new();
        let mut known_coarse: Vec<f64> = Vec::new();
        let mut sep_cache: HashMap<Key, (f64, f64)> = HashMap::new();
        let maps = &model.ifs.maps;
        while let Some(k) = queue.pop_front() {
            if table.configs.len() > options.max_configs {
                return Err(Error::Numerical(format!(
                    "self-similar table exceeds {} configurations",
                    options.max_configs
                )));
            }
            let t = table.configs[k];
            // (coefficient, child, additive constant)
            let mut terms: Vec<(f64, SimilarityMap, f64)> = Vec::new();
            if t.rho < 1.0 - RATIO_TOL {
                for s in maps {
                    let child = s.inverse().compose(&t);
                    let (coef, add) = table.level_factor(s.rho, child.rho);
                    terms.push((coef, child, add));
                }
            } else {
                for si in maps {
                    let inv = si.inverse();
                    for sj in maps {
                        let child = inv.compose(&t).compose(sj);
                        let (coef, add) = table.level_factor(si.rho, child.rho);
                        terms.push((coef, child, add));
                    }
                }
            }
            let mut row = Vec::new();
            let (mut b, mut bc) = (0.0, 0.0);
            for (coef, child, add) in terms {
                b += add;
                bc += add;
                if table.separated(&child) {
                    let key = config_key(&child, table.h0);
                    let (v, vc) = *sep_cache
                        .entry(key)
                        .or_insert_with(|| table.separated_value(rules, &child));
                    b += coef * v;
                    bc += coef * vc;
                } else {
                    let (c, aff) = table.normalize(&child);
                    let idx = table.intern(c, &mut queue);
                    row.push((idx, coef * aff.scale));
                    b += coef * aff.shift;
                    bc += coef * aff.shift;
                }
            }
            if rows.len() <= k {
                rows.resize(k + 1, Vec::new());
                known.resize(k + 1, 0.0);
                known_coarse.resize(k + 1, 0.0);
            }
            rows[k] = row;
            known[k] = b;
            known_coarse[k] = bc;
        }

        let m = table.configs.len();
        let mut a = DMatrix::<f64>::identity(m, m);
        for (k, row) in rows.iter().enumerate() {
            for &(j, c) in row {
                a[(k, j)] -= c;
            }
        }
        let lu = a.lu();
        let x = lu
            .solve(&DVector::from_vec(known))
            .ok_or_else(|| Error::Numerical("self-similar system is singular".into()))?;
        let xc = lu
            .solve(&DVector::from_vec(known_coarse))
            .ok_or_else(|| Error::Numerical("self-similar system is singular".into()))?;
        table.errors = x.iter().zip(xc.iter()).map(|(a, b)| (a - b).abs()).collect();
        table.values = x.iter().copied().collect();
        Ok(table)
    }

    /// Number of unknown configurations.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    fn intern(&mut self, c: SimilarityMap, queue: &mut VecDeque<usize>) -> usize {
        let key = config_key(&c, self.h0);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.configs.len();
        self.index.insert(key, i);
        self.configs.push(c);
        queue.push_back(i);
        i
    }

    /// Coefficient and additive term for `I(s Γ, C' Γ)` written through
    /// `J` of the child configuration with ratio `child_rho`.
    fn level_factor(&self, rho: f64, child_rho: f64) -> (f64, f64) {
        let n = self.n as i32;
        match self.kernel {
            StaticKernel::Power(t) => (rho.powf(2.0 * self.n as f64 - t), 0.0),
            StaticKernel::Log => {
                let w = rho.powi(2 * n);
                let child_measure = child_rho.powi(n) * self.measure;
                (w, w * rho.ln() * self.measure * child_measure)
            }
        }
    }

    fn separated(&self, c: &SimilarityMap) -> bool {
        let r = self.ball_radius;
        let gap = (c.apply(&self.ball_center) - self.ball_center).norm() - r - c.rho * r;
        gap >= self.options.eta * self.h0 * c.rho.max(1.0)
    }

    fn normalize(&self, c: &SimilarityMap) -> (SimilarityMap, Affine) {
        let id = Affine { scale: 1.0, shift: 0.0 };
        if c.rho > 1.0 + RATIO_TOL {
            let inv = c.inverse();
            let n = self.n as i32;
            let aff = match self.kernel {
                StaticKernel::Power(t) => Affine {
                    scale: c.rho.powf(2.0 * self.n as f64 - t),
                    shift: 0.0,
                },
                StaticKernel::Log => Affine {
                    scale: c.rho.powi(2 * n),
                    shift: c.rho.powi(n) * c.rho.ln() * self.measure * self.measure,
                },
            };
            (inv, aff)
        } else if c.rho >= 1.0 - RATIO_TOL {
            let inv = c.inverse();
            if config_key(&inv, self.h0) < config_key(c, self.h0) {
                (inv, id)
            } else {
                (*c, id)
            }
        } else {
            (*c, id)
        }
    }

    /// Tensor rule for `J(C)` with its alternative for error estimation.
    fn separated_value(&self, rules: &RuleCache, c: &SimilarityMap) -> (f64, f64) {
        let dist = (c.apply(&self.ball_center) - self.ball_center).norm();
        let k = self.kernel;
        rules.separated_pair(&SimilarityMap::identity(), c, dist, self.options.sep_rel, |r| k.eval(r))
    }

    /// `∫_{A(Γ)} ∫_{B(Γ)} k(|x − y|)` with an error estimate, for a pair that
    /// is not separated. Returns `None` when the relative configuration is
    /// separated or missing from the table.
    pub fn pair_value(&self, a: &SimilarityMap, b: &SimilarityMap) -> Option<(f64, f64)> {
        let mut big = *a;
        let mut t = a.inverse().compose(b);
        if t.rho > 1.0 + RATIO_TOL {
            big = *b;
            t = b.inverse().compose(a);
        }
        if self.separated(&t) {
            return None;
        }
        let (c, aff) = self.normalize(&t);
        let &i = self.index.get(&config_key(&c, self.h0))?;
        let j = aff.scale * self.values[i] + aff.shift;
        let e = aff.scale * self.errors[i];
        let n = self.n as i32;
        Some(match self.kernel {
            StaticKernel::Power(tt) => {
                let f = big.rho.powf(2.0 * self.n as f64 - tt);
                (f * j, f * e)
            }
            StaticKernel::Log => {
                let f = big.rho.powi(2 * n);
                let add = big.rho.ln() * self.measure * t.rho.powi(n) * self.measure;
                (f * (add + j), f * e)
            }
        })
    }

    /// `∫_Γ ∫_Γ k(|x − y|)`.
    pub fn coincident_root(&self) -> (f64, f64) {
        let id = SimilarityMap::identity();
        self.pair_value(&id, &id).expect("identity is always in the table")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::library;

    fn square() -> (AttractorModel, RuleCache) {
        let model = AttractorModel::new(library::unit_square()).unwrap();
        let rules = RuleCache::new(&model);
        (model, rules)
    }

    #[test]
    fn unit_square_inverse_distance() {
        // 4 ln(1 + √2) − (4/3)(√2 − 1), the mean inverse distance in the square
        let exact = 4.0 * (1.0 + 2f64.sqrt()).ln() - 4.0 / 3.0 * (2f64.sqrt() - 1.0);
        let (model, rules) = square();
        let table = SelfSimilarTable::build(&model, &rules, StaticKernel::Power(1.0), &[], TableOptions::default()).unwrap();
        let (v, e) = table.coincident_root();
        assert!((v - exact).abs() < 1e-4 * exact, "{v} vs {exact}");
        assert!(e < 1e-3 * exact);
    }

    #[test]
    fn unit_interval_kernels() {
        let model = AttractorModel::new(library::unit_interval()).unwrap();
        let rules = RuleCache::new(&model);
        // ∫∫_{[0,1]^2} ln|x−y| = −3/2
        let table = SelfSimilarTable::build(&model, &rules, StaticKernel::Log, &[], TableOptions::default()).unwrap();
        let (v, _) = table.coincident_root();
        assert!((v + 1.5).abs() < 1e-5, "{v}");
        // ∫∫ |x−y|^{-1/2} = 8/3
        let table = SelfSimilarTable::build(&model, &rules, StaticKernel::Power(0.5), &[], TableOptions::default()).unwrap();
        let (v, _) = table.coincident_root();
        assert!((v - 8.0 / 3.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn scaling_identities() {
        let (model, rules) = square();
        let id = SimilarityMap::identity();
        let child = model.ifs.maps[2];
        let sib = model.ifs.maps[3];
        for kernel in [StaticKernel::Power(1.0), StaticKernel::Power(0.7), StaticKernel::Log] {
            let seeds = [child.inverse().compose(&sib)];
            let table = SelfSimilarTable::build(&model, &rules, kernel, &seeds, TableOptions::default()).unwrap();
            let (root, _) = table.pair_value(&id, &id).unwrap();
            let (cc, _) = table.pair_value(&child, &child).unwrap();
            let rho: f64 = 0.5;
            let expect = match kernel {
                StaticKernel::Power(t) => rho.powf(4.0 - t) * root,
                StaticKernel::Log => rho.powi(4) * (root + rho.ln()),
            };
            assert!((cc - expect).abs() < 1e-12 * expect.abs(), "{kernel:?}");
            // the pair integral is symmetric in its arguments
            let (ab, _) = table.pair_value(&child, &sib).unwrap();
            let (ba, _) = table.pair_value(&sib, &child).unwrap();
            assert!((ab - ba).abs() <= 1e-12 * ab.abs());
        }
    }

    #[test]
    fn inhomogeneous_closure_is_additive() {
        // root = Σ over all child pairs, for the ten-map example
        let model = AttractorModel::new(library::infinite_components()).unwrap();
        let rules = RuleCache::new(&model);
        let maps = model.ifs.maps.clone();
        let mut seeds = Vec::new();
        for a in &maps {
            for b in &maps {
                seeds.push(a.inverse().compose(b));
            }
        }
        let kernel = StaticKernel::Power(1.0);
        let table = SelfSimilarTable::build(&model, &rules, kernel, &seeds, TableOptions::default()).unwrap();
        let (root, _) = table.coincident_root();
        let mut sum = 0.0;
        for a in &maps {
            for b in &maps {
                sum += match table.pair_value(a, b) {
                    Some((v, _)) => v,
                    None => {
                        let ra = rules.rule(a, 1.0 / 64.0);
                        let rb = rules.rule(b, 1.0 / 64.0);
                        let mut s = 0.0;
                        for (x, wx) in ra.nodes.iter().zip(&ra.weights) {
                            for (y, wy) in rb.nodes.iter().zip(&rb.weights) {
                                s += wx * wy / (x - y).norm();
                            }
                        }
                        s
                    }
                };
            }
        }
        assert!((sum - root).abs() < 1e-3 * root, "{sum} vs {root}");
    }

    #[test]
    fn rejects_non_integrable_power() {
        let (model, rules) = square();
        assert!(SelfSimilarTable::build(&model, &rules, StaticKernel::Power(2.0), &[], TableOptions::default()).is_err());
    }

    #[test]
    fn cone_kernel_on_interval() {
        // ∫∫_{[0,1]^2} |x − y| = 1/3
        let model = AttractorModel::new(library::unit_interval()).unwrap();
        let rules = RuleCache::new(&model);
        let table = SelfSimilarTable::build(&model, &rules, StaticKernel::Power(-1.0), &[], TableOptions::default()).unwrap();
        let (v, _) = table.coincident_root();
        assert!((v - 1.0 / 3.0).abs() < 1e-9, "{v}");
    }
}
