//! Body files: `{"type":"hpoly",...}`, `{"type":"vpoly",...}`, `{"type":"ball",...}`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use mongefoil_core::geometry::symmetrize;
use mongefoil_core::ConvexBody;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Hpoly { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Vpoly { vertices: Vec<Vec<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
}

/// Affine normalization `x -> (x - shift) / scale` applied by `--rescale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub shift: Vec<f64>,
    pub scale: f64,
}

impl Normalization {
    pub fn identity(dim: usize) -> Self {
        Normalization { shift: vec![0.0; dim], scale: 1.0 }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(a, c)| (a - c) / self.scale).collect()
    }

    pub fn backward(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(a, c)| a * self.scale + c).collect()
    }
}

impl BodySpec {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing body file {}", path.display()))
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Hpoly { normals, .. } => normals.first().map_or(0, Vec::len),
            BodySpec::Vpoly { vertices } => vertices.first().map_or(0, Vec::len),
            BodySpec::Ball { center, .. } => center.len(),
        }
    }

    pub fn build(&self) -> Result<ConvexBody> {
        let body = match self {
            BodySpec::Hpoly { normals, offsets } => ConvexBody::from_halfspaces(normals.clone(), offsets.clone()),
            BodySpec::Vpoly { vertices } => ConvexBody::from_vertices(vertices.clone()),
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
        };
        Ok(body?)
    }

    pub fn from_body(body: &ConvexBody) -> Result<Self> {
        match body.polytope_vertices() {
            Some(vertices) => Ok(BodySpec::Vpoly { vertices }),
            None => bail!("only polytopes convert back to body files"),
        }
    }

    /// `(K - K) / 2`; a ball becomes the same ball centered at the origin.
    pub fn symmetrized(&self) -> Result<Self> {
        match self {
            BodySpec::Ball { center, radius } => Ok(BodySpec::Ball {
                center: vec![0.0; center.len()],
                radius: *radius,
            }),
            _ => Self::from_body(&symmetrize(&self.build()?)?),
        }
    }

    /// Translate an interior point to the origin and scale the farthest
    /// vertex (or the radius) to 1.
    pub fn normalized(&self) -> Result<(Self, Normalization)> {
        let body = self.build()?;
        let shift = body.interior_point();
        let scale = match self {
            BodySpec::Ball { radius, .. } => *radius,
            _ => body
                .polytope_vertices()
                .unwrap_or_default()
                .iter()
                .map(|v| v.iter().zip(&shift).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        };
        if !(scale > 0.0) {
            bail!("body has no extent to normalize");
        }
        let norm = Normalization { shift, scale };
        let spec = match self {
            BodySpec::Hpoly { normals, offsets } => BodySpec::Hpoly {
                normals: normals.clone(),
                offsets: normals
                    .iter()
                    .zip(offsets)
                    .map(|(l, b)| (b - l.iter().zip(&norm.shift).map(|(p, q)| p * q).sum::<f64>()) / scale)
                    .collect(),
            },
            BodySpec::Vpoly { vertices } => BodySpec::Vpoly {
                vertices: vertices.iter().map(|v| norm.forward(v)).collect(),
            },
            BodySpec::Ball { center, .. } => BodySpec::Ball {
                center: norm.forward(center),
                radius: 1.0,
            },
        };
        Ok((spec, norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let h: BodySpec = serde_json::from_str(r#"{"type":"hpoly","normals":[[1,0],[-1,0],[0,1],[0,-1]],"offsets":[1,1,1,1]}"#).unwrap();
        assert_eq!(h.dim(), 2);
        h.build().unwrap();
        let v: BodySpec = serde_json::from_str(r#"{"type":"vpoly","vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
        v.build().unwrap();
        let b: BodySpec = serde_json::from_str(r#"{"type":"ball","center":[0,0],"radius":2}"#).unwrap();
        b.build().unwrap();
        assert!(serde_json::from_str::<BodySpec>(r#"{"type":"cube"}"#).is_err());
    }

    #[test]
    fn normalization_round_trip() {
        let v = BodySpec::Vpoly { vertices: vec![vec![2.0, 2.0], vec![6.0, 2.0], vec![2.0, 6.0]] };
        let (spec, n) = v.normalized().unwrap();
        let BodySpec::Vpoly { vertices } = &spec else { panic!() };
        let far = vertices.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        assert!((far - 1.0).abs() < 1e-12);
        assert_eq!(n.backward(&vertices[0]), vec![2.0, 2.0]);

        let h = BodySpec::Hpoly {
            normals: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            offsets: vec![5.0, -1.0, 2.0, 2.0],
        };
        let (spec, n) = h.normalized().unwrap();
        let body = spec.build().unwrap();
        let corner = n.forward(&[5.0, 2.0]);
        assert!(mongefoil_core::geometry::contains(&body, &corner, 1e-12));
        assert!(!mongefoil_core::geometry::contains(&body, &n.forward(&[5.1, 2.0]), 1e-12));
    }
}
