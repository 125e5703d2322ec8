//! JSON definition files for iterated function systems.

use std::path::Path;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::similarity::{rotation_matrix, Point, SimilarityMap};
use super::system::IteratedFunctionSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsFile {
    pub name: String,
    pub ambient_dim: usize,
    pub maps: Vec<MapEntry>,
    #[serde(default)]
    pub declared_measure: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthogonal: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub reflect: bool,
    pub translation: Vec<f64>,
}

impl IfsFile {
    pub fn into_ifs(self) -> Result<IteratedFunctionSystem> {
        let n = self.ambient_dim;
        if !(1..=2).contains(&n) {
            return Err(Error::invalid("ambient_dim", format!("{n} is not 1 or 2")));
        }
        let mut maps = Vec::with_capacity(self.maps.len());
        for (k, e) in self.maps.into_iter().enumerate() {
            let field = |f: &str| format!("maps[{k}].{f}");
            if e.translation.len() != n {
                return Err(Error::invalid(
                    field("translation"),
                    format!("expected {n} components, got {}", e.translation.len()),
                ));
            }
            if !(e.rho > 0.0 && e.rho < 1.0) {
                return Err(Error::invalid(field("rho"), format!("{} is not in (0,1)", e.rho)));
            }
            let q = match (n, e.rotation_deg, &e.orthogonal) {
                (_, Some(_), Some(_)) => {
                    return Err(Error::invalid(
                        field("orthogonal"),
                        "give either rotation_deg or orthogonal, not both",
                    ))
                }
                (1, Some(_), _) => {
                    return Err(Error::invalid(field("rotation_deg"), "not allowed for ambient_dim 1"))
                }
                (1, None, Some(o)) => {
                    if o.len() != 1 || o[0].len() != 1 || o[0][0].abs() != 1.0 {
                        return Err(Error::invalid(field("orthogonal"), "must be [[1]] or [[-1]]"));
                    }
                    let sign = o[0][0] * if e.reflect { -1.0 } else { 1.0 };
                    Matrix2::new(sign, 0.0, 0.0, 1.0)
                }
                (1, None, None) => Matrix2::new(if e.reflect { -1.0 } else { 1.0 }, 0.0, 0.0, 1.0),
                (_, deg, None) => rotation_matrix(deg.unwrap_or(0.0), e.reflect),
                (_, None, Some(o)) => {
                    if o.len() != 2 || o.iter().any(|r| r.len() != 2) {
                        return Err(Error::invalid(field("orthogonal"), "must be a 2x2 matrix"));
                    }
                    let m = Matrix2::new(o[0][0], o[0][1], o[1][0], o[1][1]);
                    if e.reflect {
                        m * Matrix2::new(1.0, 0.0, 0.0, -1.0)
                    } else {
                        m
                    }
                }
            };
            let t = if n == 1 {
                Point::new(e.translation[0], 0.0)
            } else {
                Point::new(e.translation[0], e.translation[1])
            };
            let map = SimilarityMap::new(e.rho, q, t).map_err(|err| match err {
                Error::Invalid { reason, .. } => Error::invalid(field("orthogonal"), reason),
                other => other,
            })?;
            maps.push(map);
        }
        IteratedFunctionSystem::new(self.name, n, maps, self.declared_measure)
    }

    /// Writes orthogonal parts as explicit matrices so that reading the file
    /// back reproduces every bit.
    pub fn from_ifs(ifs: &IteratedFunctionSystem) -> Self {
        let n = ifs.ambient_dim;
        let maps = ifs
            .maps
            .iter()
            .map(|m| {
                let q = &m.orthogonal;
                let (orthogonal, translation) = if n == 1 {
                    (vec![vec![q[(0, 0)]]], vec![m.translation.x])
                } else {
                    (
                        vec![vec![q[(0, 0)], q[(0, 1)]], vec![q[(1, 0)], q[(1, 1)]]],
                        vec![m.translation.x, m.translation.y],
                    )
                };
                MapEntry {
                    rho: m.rho,
                    rotation_deg: None,
                    orthogonal: Some(orthogonal),
                    reflect: false,
                    translation,
                }
            })
            .collect();
        IfsFile {
            name: ifs.name.clone(),
            ambient_dim: n,
            maps,
            declared_measure: ifs.declared_measure,
        }
    }
}

pub fn parse_ifs_str(text: &str) -> Result<IteratedFunctionSystem> {
    let file: IfsFile = serde_json::from_str(text)?;
    file.into_ifs()
}

pub fn parse_ifs_file(path: impl AsRef<Path>) -> Result<IteratedFunctionSystem> {
    let text = std::fs::read_to_string(path)?;
    parse_ifs_str(&text)
}

pub fn serialize_ifs(ifs: &IteratedFunctionSystem) -> String {
    serde_json::to_string_pretty(&IfsFile::from_ifs(ifs)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::library;

    #[test]
    fn rejects_bad_rho_with_path() {
        let text = r#"{"name":"bad","ambient_dim":2,"maps":[
            {"rho":0.5,"translation":[0,0]},
            {"rho":1.2,"translation":[0.5,0]}]}"#;
        let err = parse_ifs_str(text).unwrap_err().to_string();
        assert!(err.contains("maps[1].rho"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_and_non_orthogonal() {
        let text = r#"{"name":"x","ambient_dim":2,"colour":1,"maps":[]}"#;
        assert!(parse_ifs_str(text).is_err());
        let text = r#"{"name":"x","ambient_dim":2,"maps":[
            {"rho":0.5,"orthogonal":[[1,0.2],[0,1]],"translation":[0,0]},
            {"rho":0.5,"translation":[0.5,0]}]}"#;
        let err = parse_ifs_str(text).unwrap_err().to_string();
        assert!(err.contains("maps[0].orthogonal"), "{err}");
    }

    #[test]
    fn roundtrip_library() {
        for ifs in library::all() {
            let back = parse_ifs_str(&serialize_ifs(&ifs)).unwrap();
            assert_eq!(back, ifs);
        }
    }
}
