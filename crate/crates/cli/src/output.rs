//! Leaf records and CSV formatting.

use mongefoil_core::extremal::{CenterSet, ExtremalDisk};
use num_complex::Complex64;
use serde::Serialize;

use crate::body::Normalization;

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CenterSetRecord {
    /// Endpoints of the planar center segment.
    Segment(Vec<Vec<f64>>),
    Probes { extents: Vec<[f64; 2]>, points: Vec<Vec<f64>> },
    Pinned { pinned: Vec<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafRecord {
    pub direction: Vec<[f64; 2]>,
    /// Canonicalizing factor: the direction divided by `lambda` has a leading 1.
    pub lambda: [f64; 2],
    pub rho: f64,
    pub center: Vec<f64>,
    pub center_set: CenterSetRecord,
    pub area: f64,
    pub degenerate: bool,
}

impl LeafRecord {
    /// Record in the original coordinates of a body that was solved after
    /// normalization (the direction is the caller's, unscaled).
    pub fn new(disk: &ExtremalDisk, direction: &[Complex64], norm: &Normalization) -> Self {
        let back = |x: &[f64]| norm.backward(x);
        let center_set = match &disk.center_set {
            CenterSet::Interval { lo, hi } => CenterSetRecord::Segment(vec![back(lo), back(hi)]),
            CenterSet::Probes { extents, points } => CenterSetRecord::Probes {
                extents: extents
                    .iter()
                    .zip(&norm.shift)
                    .map(|((a, b), c)| [a * norm.scale + c, b * norm.scale + c])
                    .collect(),
                points: points.iter().map(|p| back(p)).collect(),
            },
            CenterSet::Pinned { center } => CenterSetRecord::Pinned { pinned: back(center) },
        };
        let lambda = disk.direction.lambda() * norm.scale;
        LeafRecord {
            direction: direction.iter().map(|c| [c.re, c.im]).collect(),
            lambda: [lambda.re, lambda.im],
            rho: disk.rho,
            center: back(&disk.center),
            center_set,
            area: disk.ellipse_area() * norm.scale * norm.scale,
            degenerate: disk.is_degenerate,
        }
    }
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex_columns(z: &[Complex64]) -> Vec<String> {
    z.iter().flat_map(|c| [num(c.re), num(c.im)]).collect()
}

pub fn complex_header(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim)
        .flat_map(|k| [format!("re_{prefix}{k}"), format!("im_{prefix}{k}")])
        .collect()
}

/// Quote a free-text CSV field when needed.
pub fn text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(text("a,b"), "\"a,b\"");
        assert_eq!(text("plain"), "plain");
    }
}
