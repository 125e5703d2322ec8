//! Direct recursive subdivision of singular double integrals, used as an
//! independent check on the self-similar table.

use serde::{Deserialize, Serialize};

use super::rule::RuleCache;
use super::selfsimilar::StaticKernel;
use crate::ifs::{AttractorModel, SimilarityMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionOptions {
    pub eta: f64,
    pub sep_rel: f64,
    pub depth_cap: usize,
}

impl Default for RecursionOptions {
    fn default() -> Self {
        Self {
            eta: 1.0,
            sep_rel: 0.25,
            depth_cap: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionResult {
    pub value: f64,
    /// Bound on the part contributed by pairs cut off at the depth cap.
    pub truncation: f64,
    pub capped_pairs: usize,
    /// Sum of the separated-pair error estimates.
    pub quadrature_error: f64,
}

/// `∫_{A(Γ)} ∫_{B(Γ)} k(|x − y|)` by subdividing non-separated pairs (the
/// larger cell, or both when equal) down to `depth_cap`. Capped pairs use the
/// barycenters of their children, skipping coincident children.
pub fn recursive_double_integral(
    model: &AttractorModel,
    rules: &RuleCache,
    a: &SimilarityMap,
    b: &SimilarityMap,
    kernel: StaticKernel,
    opts: RecursionOptions,
) -> RecursionResult {
    let mut out = RecursionResult {
        value: 0.0,
        truncation: 0.0,
        capped_pairs: 0,
        quadrature_error: 0.0,
    };
    let same = a == b;
    recurse(model, rules, a, b, same, 0, kernel, &opts, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    model: &AttractorModel,
    rules: &RuleCache,
    a: &SimilarityMap,
    b: &SimilarityMap,
    same: bool,
    depth: usize,
    kernel: StaticKernel,
    opts: &RecursionOptions,
    out: &mut RecursionResult,
) {
    let ball = &model.bounding_ball;
    let h0 = model.h0();
    let n = model.n() as i32;
    let maps = &model.ifs.maps;
    let (ba, bb) = (ball.mapped(a), ball.mapped(b));
    let dmax = a.rho.max(b.rho) * h0;
    if !same && ba.gap(&bb) >= opts.eta * dmax {
        let dist = (ba.center - bb.center).norm();
        let (v, alt) = rules.separated_pair(a, b, dist, opts.sep_rel, |r| kernel.eval(r));
        out.value += v;
        out.quadrature_error += (v - alt).abs();
        return;
    }
    if depth >= opts.depth_cap {
        let kids = |m: &SimilarityMap| -> Vec<(crate::ifs::Point, f64)> {
            maps.iter()
                .map(|s| {
                    let c = m.compose(s);
                    (c.apply(&model.barycenter), c.rho.powi(n) * model.measure())
                })
                .collect()
        };
        let (ka, kb) = (kids(a), kids(b));
        let mut s = 0.0;
        for (i, (x, wx)) in ka.iter().enumerate() {
            for (j, (y, wy)) in kb.iter().enumerate() {
                if same && i == j {
                    continue;
                }
                s += wx * wy * kernel.eval((x - y).norm());
            }
        }
        out.value += s;
        let (ma, mb) = (a.rho.powi(n) * model.measure(), b.rho.powi(n) * model.measure());
        let local = match kernel {
            StaticKernel::Power(t) => (dmax / 4.0).powf(-t),
            StaticKernel::Log => dmax.ln().abs() + 1.0,
        };
        out.truncation += ma * mb * local;
        out.capped_pairs += 1;
        return;
    }
    if same {
        let kids: Vec<SimilarityMap> = maps.iter().map(|s| a.compose(s)).collect();
        for i in 0..kids.len() {
            recurse(model, rules, &kids[i], &kids[i], true, depth + 1, kernel, opts, out);
            for j in i + 1..kids.len() {
                let (v0, t0, q0) = (out.value, out.truncation, out.quadrature_error);
                recurse(model, rules, &kids[i], &kids[j], false, depth + 1, kernel, opts, out);
                out.value += out.value - v0;
                out.truncation += out.truncation - t0;
                out.quadrature_error += out.quadrature_error - q0;
            }
        }
        return;
    }
    let split_a = a.rho >= b.rho * (1.0 - 1e-12);
    let split_b = b.rho >= a.rho * (1.0 - 1e-12);
    let ka: Vec<SimilarityMap> = if split_a { maps.iter().map(|s| a.compose(s)).collect() } else { vec![*a] };
    let kb: Vec<SimilarityMap> = if split_b { maps.iter().map(|s| b.compose(s)).collect() } else { vec![*b] };
    for x in &ka {
        for y in &kb {
            recurse(model, rules, x, y, false, depth + 1, kernel, opts, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::library;

    #[test]
    fn interval_log_kernel_converges() {
        let model = AttractorModel::new(library::unit_interval()).unwrap();
        let rules = RuleCache::new(&model);
        let id = SimilarityMap::identity();
        let opts = RecursionOptions { depth_cap: 14, ..Default::default() };
        let r = recursive_double_integral(&model, &rules, &id, &id, StaticKernel::Log, opts);
        assert!((r.value + 1.5).abs() < 2e-3, "{r:?}");
    }
}
