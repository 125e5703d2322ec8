use std::fmt;

use serde::{Deserialize, Serialize};

use super::attractor::{AttractorModel, Ball};
use super::similarity::{Point, SimilarityMap};
use crate::error::{Error, Result};

/// Finite word `(m_1, ..., m_l)` over the map alphabet, zero-based.
/// The empty word is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u16>);

impl MultiIndex {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops the last entry; the parent of the root is `None`.
    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(Self(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, m: usize) -> Self {
        let mut v = self.0.clone();
        v.push(m as u16);
        Self(v)
    }

    pub fn is_prefix_of(&self, other: &MultiIndex) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

/// One-based, dot separated; the root prints as `0`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|m| (m + 1).to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A cell `Gamma_m = s_m(Gamma)` with its exact bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: MultiIndex,
    /// `s_{m_1} ∘ ... ∘ s_{m_l}`; its `rho` is the composed ratio.
    pub map: SimilarityMap,
    pub diameter: f64,
    pub measure: f64,
    pub barycenter: Point,
}

impl Cell {
    pub fn root(model: &AttractorModel) -> Self {
        Self::from_map(model, MultiIndex::root(), SimilarityMap::identity())
    }

    pub fn from_map(model: &AttractorModel, index: MultiIndex, map: SimilarityMap) -> Self {
        let ratio = map.rho;
        Cell {
            index,
            diameter: ratio * model.h0(),
            measure: ratio.powi(model.n() as i32) * model.measure(),
            barycenter: map.apply(&model.barycenter),
            map,
        }
    }

    pub fn from_index(model: &AttractorModel, index: &MultiIndex) -> Self {
        let mut map = SimilarityMap::identity();
        for &m in &index.0 {
            map = map.compose(&model.ifs.maps[m as usize]);
        }
        Self::from_map(model, index.clone(), map)
    }

    pub fn child(&self, model: &AttractorModel, m: usize) -> Cell {
        Self::from_map(model, self.index.child(m), self.map.compose(&model.ifs.maps[m]))
    }

    pub fn children(&self, model: &AttractorModel) -> Vec<Cell> {
        (0..model.ifs.len()).map(|m| self.child(model, m)).collect()
    }

    pub fn ratio(&self) -> f64 {
        self.map.rho
    }

    pub fn ball(&self, model: &AttractorModel) -> Ball {
        model.bounding_ball.mapped(&self.map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeshParameter {
    /// All words of length `l`.
    Level(usize),
    /// Words whose diameter first drops to `<= h`.
    Diameter(f64),
}

/// A decomposition `{Gamma_m}` of the attractor, sorted by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalMesh {
    pub parameter: MeshParameter,
    pub cells: Vec<Cell>,
}

impl FractalMesh {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    pub fn max_diameter(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    pub fn min_diameter(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(f64::INFINITY, f64::min)
    }

    /// Mesh size: the `h` of a diameter mesh, the max diameter otherwise.
    pub fn h(&self) -> f64 {
        match self.parameter {
            MeshParameter::Diameter(h) => h,
            MeshParameter::Level(_) => self.max_diameter(),
        }
    }

    /// CSV rows `index;diameter;measure;barycenter coordinates`.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("index;diameter;measure");
        for k in 0..n {
            out.push_str(&format!(";barycenter_{k}"));
        }
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!("{};{:.17e};{:.17e}", c.index, c.diameter, c.measure));
            for k in 0..n {
                out.push_str(&format!(";{:.17e}", c.barycenter[k]));
            }
            out.push('\n');
        }
        out
    }
}

/// `I_l`: all `M^l` words of length `l`, in lexicographic order.
pub fn generate_level_mesh(model: &AttractorModel, level: usize) -> FractalMesh {
    let mut cells = vec![Cell::root(model)];
    for _ in 0..level {
        cells = cells.iter().flat_map(|c| c.children(model)).collect();
    }
    FractalMesh {
        parameter: MeshParameter::Level(level),
        cells,
    }
}

/// `L_h`: depth-first descent emitting a cell as soon as its diameter is
/// `<= h`. For `h = h0` the mesh is the root alone.
pub fn generate_diameter_mesh(model: &AttractorModel, h: f64) -> Result<FractalMesh> {
    let h0 = model.h0();
    if !(h > 0.0) {
        return Err(Error::invalid("h", format!("{h} must be positive")));
    }
    if h > h0 {
        return Err(Error::invalid("h", format!("{h} exceeds h0 = {h0}")));
    }
    let mut cells = Vec::new();
    descend(model, Cell::root(model), h, &mut cells);
    Ok(FractalMesh {
        parameter: MeshParameter::Diameter(h),
        cells,
    })
}

fn descend(model: &AttractorModel, cell: Cell, h: f64, out: &mut Vec<Cell>) {
    if cell.diameter <= h {
        out.push(cell);
        return;
    }
    for m in 0..model.ifs.len() {
        descend(model, cell.child(model, m), h, out);
    }
}

/// Sub-decomposition of the root attractor at relative size `h_rel = h/h0`,
/// returned as (barycenter, measure) pairs. Used as a reusable quadrature
/// template: mapping it by a cell's map gives the cell's rule.
pub fn root_rule(model: &AttractorModel, h_rel: f64) -> Vec<(Point, f64)> {
    let h = (h_rel.min(1.0)) * model.h0();
    let mut out = Vec::new();
    fn walk(model: &AttractorModel, map: SimilarityMap, h: f64, out: &mut Vec<(Point, f64)>) {
        if map.rho * model.h0() <= h {
            out.push((
                map.apply(&model.barycenter),
                map.rho.powi(model.n() as i32) * model.measure(),
            ));
            return;
        }
        for s in &model.ifs.maps {
            walk(model, map.compose(s), h, out);
        }
    }
    walk(model, SimilarityMap::identity(), h, &mut out);
    out
}
