//! Classification of cell pairs for the double integrals.

use serde::{Deserialize, Serialize};

use crate::ifs::{AttractorModel, Cell, SimilarityMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    /// Same cell.
    Coincident,
    /// Bounding balls closer than `η · max diameter`.
    Near,
    Separated,
}

pub fn classify_maps(model: &AttractorModel, a: &SimilarityMap, b: &SimilarityMap, eta: f64) -> PairClass {
    if a == b {
        return PairClass::Coincident;
    }
    let ball = &model.bounding_ball;
    let gap = ball.mapped(a).gap(&ball.mapped(b));
    if gap >= eta * a.rho.max(b.rho) * model.h0() {
        PairClass::Separated
    } else {
        PairClass::Near
    }
}

pub fn classify(model: &AttractorModel, a: &Cell, b: &Cell, eta: f64) -> PairClass {
    if a.index == b.index {
        return PairClass::Coincident;
    }
    classify_maps(model, &a.map, &b.map, eta)
}

/// Distance between the bounding-ball centers of two cells.
pub fn center_distance(model: &AttractorModel, a: &SimilarityMap, b: &SimilarityMap) -> f64 {
    let ball = &model.bounding_ball;
    (ball.mapped(a).center - ball.mapped(b).center).norm()
}
