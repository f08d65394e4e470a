//! Intersections of two planar leaves outside the body.
//!
//! A nondegenerate leaf with direction `v' = p + iq` and center `a'` lies on
//! the affine quadric `a' + rho'(p X + q Y)` with `X^2 + Y^2 = 4`, where
//! `X = xi + 1/xi` and `Y = i(1/xi - xi)`. Substituting the other leaf
//! `z(zeta) = a + rho(v / zeta + conj(v) zeta)` gives a quartic in `zeta`.
//! A segment leaf lies on a complex line, which gives a quadratic instead.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::extremal::{solve_with_rule, CenterRule, DirectionAtInfinity, ExtremalDisk};
use crate::geometry::{exterior_margin, ConvexBody};

/// Points closer than this to `K` (in [`exterior_margin`]) are treated as in `K`.
pub const MARGIN_TOL: f64 = 1e-7;

/// Parameters are taken as interior when `|zeta| < 1 - PARAM_TOL`.
pub const PARAM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionWitness {
    pub zeta1: Complex64,
    pub zeta2: Complex64,
    pub point: Vec<Complex64>,
    /// Exterior margin of the point; positive means outside `K`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessReport {
    /// Smallest distance between sampled points of the two leaves that lie
    /// outside the tolerance neighborhood of `K`.
    pub min_sample_distance: f64,
    /// Exact intersections in the open parameter disks, outside `K`.
    pub witnesses: Vec<IntersectionWitness>,
    /// True when the two leaves lie on the same algebraic curve.
    pub same_curve: bool,
}

impl DisjointnessReport {
    pub fn disjoint(&self) -> bool {
        self.witnesses.is_empty()
    }
}

fn bdot(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Roots of `c[0] + c[1] x + ... + c[d] x^d` by Aberth iteration, ignoring
/// negligible leading coefficients. Degrees here are at most four.
fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = c.len() - 1;
    while deg > 0 && c[deg].norm() <= 1e-13 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in (0..=deg).rev() {
            dp = dp * x + p;
            p = p * x + c[k];
        }
        (p, dp)
    };
    // Start on a circle of geometric-mean radius, rotated off the axes.
    let radius = (c[0] / c[deg]).norm().powf(1.0 / deg as f64).max(1e-3);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (roots[i] - roots[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                roots[i] -= step;
                moved = moved.max(step.norm() / (1.0 + roots[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

fn inverse2(p: &[f64], q: &[f64]) -> Option<[[f64; 2]; 2]> {
    let det = p[0] * q[1] - q[0] * p[1];
    let scale = (p[0].hypot(p[1]) * q[0].hypot(q[1])).max(1e-300);
    if det.abs() <= 1e-12 * scale {
        return None;
    }
    Some([[q[1] / det, -q[0] / det], [-p[1] / det, p[0] / det]])
}

fn apply(m: &[[f64; 2]; 2], x: [Complex64; 2]) -> [Complex64; 2] {
    [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
}

/// Parameter on `leaf` of a point assumed to lie on its curve; the root of
/// smaller modulus when there are two.
fn parameter_on(leaf: &ExtremalDisk, z: &[Complex64]) -> Option<Complex64> {
    let v = leaf.direction.raw();
    let d: Vec<Complex64> = z.iter().zip(&leaf.center).map(|(x, a)| (x - a) / leaf.rho).collect();
    // d = v / xi + conj(v) xi  =>  conj(v_j) xi^2 - d_j xi + v_j = 0 on the best-scaled component.
    let j = if v[0].norm() >= v[1].norm() { 0 } else { 1 };
    let (a, b, c) = (v[j].conj(), -d[j], v[j]);
    let disc = (b * b - 4.0 * a * c).sqrt();
    let r1 = (-b + disc) / (2.0 * a);
    let r2 = (-b - disc) / (2.0 * a);
    let best = [r1, r2]
        .into_iter()
        .filter(|x| x.norm() > 0.0)
        .min_by(|x, y| {
            let err = |xi: &Complex64| -> f64 {
                let p = leaf.curve_point(*xi);
                p.iter().zip(z).map(|(a, b)| (a - b).norm()).sum()
            };
            err(x).total_cmp(&err(y)).then(x.norm().total_cmp(&y.norm()))
        })?;
    Some(best)
}

/// Candidate parameters `zeta` on `first` where it meets the curve of `second`.
fn crossing_parameters(first: &ExtremalDisk, second: &ExtremalDisk) -> (Vec<Complex64>, bool) {
    let a: [f64; 2] = [first.center[0] - second.center[0], first.center[1] - second.center[1]];
    let v = first.direction.raw();
    let s = first.rho / second.rho;
    let p2 = second.direction.re();
    let q2 = second.direction.im();
    let coeffs: Vec<Complex64> = if let Some(m) = inverse2(&p2, &q2) {
        let ca = apply(&m, [Complex64::new(a[0] / second.rho, 0.0), Complex64::new(a[1] / second.rho, 0.0)]);
        let cb = apply(&m, [v[0] * s, v[1] * s]);
        let cc = apply(&m, [v[0].conj() * s, v[1].conj() * s]);
        vec![
            bdot(&cb, &cb),
            2.0 * bdot(&ca, &cb),
            bdot(&ca, &ca) + 2.0 * bdot(&cb, &cc) - 4.0,
            2.0 * bdot(&ca, &cc),
            bdot(&cc, &cc),
        ]
    } else {
        // Segment leaf: the complex line through its center along its real direction.
        let dir = if p2[0].hypot(p2[1]) >= q2[0].hypot(q2[1]) { p2 } else { q2 };
        let nrm = [-dir[1], dir[0]];
        let nv = Complex64::new(0.0, 0.0) + v[0] * nrm[0] + v[1] * nrm[1];
        let na = nrm[0] * a[0] + nrm[1] * a[1];
        vec![first.rho * nv, Complex64::new(na, 0.0), first.rho * nv.conj()]
    };
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let same = scale <= 1e-12 * (1.0 + a[0].abs() + a[1].abs());
    if same {
        return (Vec::new(), true);
    }
    (poly_roots(&coeffs), false)
}

fn sample_leaf(body: &ConvexBody, leaf: &ExtremalDisk, n_samples: usize) -> Vec<Vec<Complex64>> {
    let rings = ((n_samples as f64).sqrt().ceil() as usize).max(2);
    let per_ring = n_samples.div_ceil(rings).max(4);
    let mut out = Vec::with_capacity(rings * per_ring);
    for i in 0..rings {
        let r = (i as f64 + 1.0) / rings as f64;
        for k in 0..per_ring {
            let t = 2.0 * PI * (k as f64 + 0.5 * (i % 2) as f64) / per_ring as f64;
            let z = leaf.curve_point(Complex64::from_polar(r, t));
            let re: Vec<f64> = z.iter().map(|c| c.re).collect();
            let im: Vec<f64> = z.iter().map(|c| c.im).collect();
            if exterior_margin(body, &re, &im) > 1e-6 {
                out.push(z);
            }
        }
    }
    out
}

/// Checks two planar leaves for intersection outside `K`, both by sampling
/// the closed parameter disks and by solving for the exact crossings.
pub fn leaves_disjoint(body: &ConvexBody, first: &ExtremalDisk, second: &ExtremalDisk, n_samples: usize) -> Result<DisjointnessReport> {
    if body.dim() != 2 || first.direction.dim() != 2 || second.direction.dim() != 2 {
        return Err(invalid("leaf intersection is implemented for planar bodies"));
    }
    let pts1 = sample_leaf(body, first, n_samples);
    let pts2 = sample_leaf(body, second, n_samples);
    let mut min_sample_distance = f64::INFINITY;
    for a in &pts1 {
        for b in &pts2 {
            let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            min_sample_distance = min_sample_distance.min(d);
        }
    }

    let (roots, same_curve) = crossing_parameters(first, second);
    let mut witnesses = Vec::new();
    for zeta1 in roots {
        let r = zeta1.norm();
        if !(r > 0.0 && r < 1.0 - PARAM_TOL) {
            continue;
        }
        let point = first.curve_point(zeta1);
        let Some(zeta2) = parameter_on(second, &point) else {
            continue;
        };
        if zeta2.norm() >= 1.0 - PARAM_TOL {
            continue;
        }
        let back = second.curve_point(zeta2);
        let err: f64 = back.iter().zip(&point).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let size: f64 = point.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if err > 1e-7 * (1.0 + size) {
            continue;
        }
        let re: Vec<f64> = point.iter().map(|c| c.re).collect();
        let im: Vec<f64> = point.iter().map(|c| c.im).collect();
        let margin = exterior_margin(body, &re, &im);
        if margin > MARGIN_TOL {
            witnesses.push(IntersectionWitness {
                zeta1,
                zeta2,
                point,
                margin,
            });
        }
    }
    Ok(DisjointnessReport {
        min_sample_distance,
        witnesses,
        same_curve,
    })
}

/// Solves both directions with the given center rule and checks the leaves.
pub fn leaf_disjointness_check(
    body: &ConvexBody,
    dir1: &DirectionAtInfinity,
    dir2: &DirectionAtInfinity,
    rule: &CenterRule,
    n_samples: usize,
) -> Result<DisjointnessReport> {
    if dir1.same_point(dir2, 1e-12) {
        return Err(invalid("directions must be distinct points at infinity"));
    }
    let first = solve_with_rule(body, dir1, rule)?;
    let second = solve_with_rule(body, dir2, rule)?;
    leaves_disjoint(body, &first, &second, n_samples)
}
