//! Extremal complex ellipses: for a direction at infinity `[0:v]`, the
//! holomorphic disks `a + rho (v / zeta + conj(v) zeta)` whose boundary
//! ellipse fits in `K` with `rho` as large as possible.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{degenerate, invalid, Error, Result};
use crate::geometry::{direction_samples, ConvexBody, HPolytope, SupportBody};
use crate::linalg::norm;
use crate::lp::{dot, optimal_face_points, solve_lp, LinearProgram, LpSolution, LpStatus};
use crate::search::maximize_on_sphere;

/// Relative wedge threshold below which a direction counts as real up to phase.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Below this width a center interval is treated as a point.
pub const SINGLETON_TOL: f64 = 1e-9;

/// A point `[0:v]` of the hyperplane at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionAtInfinity {
    raw: Vec<Complex64>,
    canonical: Vec<Complex64>,
    lambda: Complex64,
}

/// `v` rescaled so that its first largest-modulus entry is exactly 1, with
/// `v = lambda * canonical`.
pub fn canonicalize(v: &[Complex64]) -> Result<DirectionAtInfinity> {
    if v.is_empty() {
        return Err(invalid("direction needs at least one component"));
    }
    if v.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(invalid("direction has non-finite components"));
    }
    let mut pivot = 0;
    for (i, c) in v.iter().enumerate() {
        if c.norm() > v[pivot].norm() {
            pivot = i;
        }
    }
    let lambda = v[pivot];
    if lambda.norm() == 0.0 {
        return Err(invalid("direction at infinity must be nonzero"));
    }
    let mut canonical: Vec<Complex64> = v.iter().map(|c| c / lambda).collect();
    canonical[pivot] = Complex64::new(1.0, 0.0);
    Ok(DirectionAtInfinity {
        raw: v.to_vec(),
        canonical,
        lambda,
    })
}

impl DirectionAtInfinity {
    pub fn new(v: &[Complex64]) -> Result<Self> {
        canonicalize(v)
    }

    /// Direction given by real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(invalid("real and imaginary parts differ in length"));
        }
        let v: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        canonicalize(&v)
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.raw
    }

    pub fn canonical(&self) -> &[Complex64] {
        &self.canonical
    }

    /// Scale with `raw = lambda * canonical`.
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.raw.len()
    }

    pub fn re(&self) -> Vec<f64> {
        self.raw.iter().map(|c| c.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.raw.iter().map(|c| c.im).collect()
    }

    /// `|v|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.raw.iter().map(Complex64::norm_sqr).sum()
    }

    /// `|Re v ∧ Im v|`; invariant under multiplying `v` by a unimodular scalar.
    pub fn wedge(&self) -> f64 {
        let (p, q) = (self.re(), self.im());
        let mut s = 0.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let m = p[i] * q[j] - p[j] * q[i];
                s += m * m;
            }
        }
        s.sqrt()
    }

    /// True when `v` is a real vector up to a phase factor.
    pub fn is_degenerate(&self) -> bool {
        self.wedge() < DEGENERACY_TOL * self.norm_sqr()
    }

    /// `|<l, v>|` for a real covector `l` (complex bilinear pairing).
    pub fn pairing_modulus(&self, l: &[f64]) -> f64 {
        let re: f64 = l.iter().zip(&self.raw).map(|(a, c)| a * c.re).sum();
        let im: f64 = l.iter().zip(&self.raw).map(|(a, c)| a * c.im).sum();
        re.hypot(im)
    }

    pub fn conj(&self) -> Self {
        let v: Vec<Complex64> = self.raw.iter().map(Complex64::conj).collect();
        canonicalize(&v).expect("conjugate of a valid direction")
    }

    /// Same projective point as `other`.
    pub fn same_point(&self, other: &Self, tol: f64) -> bool {
        self.canonical.len() == other.canonical.len()
            && self
                .canonical
                .iter()
                .zip(&other.canonical)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// The optimal centers for a direction.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterSet {
    /// Planar case: the segment `[lo, hi]` (possibly a single point).
    Interval { lo: Vec<f64>, hi: Vec<f64> },
    /// Dimension three and up: minimum and maximum of each coordinate over
    /// the set, and the `2n` points attaining them.
    Probes {
        extents: Vec<(f64, f64)>,
        points: Vec<Vec<f64>>,
    },
    /// Center fixed by a declared symmetry of the body; the rest of the set
    /// is not computed.
    Pinned { center: Vec<f64> },
}

impl CenterSet {
    /// Diameter of the set (a lower bound for probe extents); `None` when pinned.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            CenterSet::Interval { lo, hi } => Some(norm(&crate::linalg::sub(hi, lo))),
            CenterSet::Probes { extents, .. } => {
                Some(extents.iter().map(|(a, b)| b - a).fold(0.0, f64::max))
            }
            CenterSet::Pinned { .. } => None,
        }
    }

    pub fn is_singleton(&self, tol: f64) -> bool {
        self.diameter().is_none_or(|d| d <= tol)
    }

    /// Midpoint of the interval, or the average of the probe points.
    pub fn barycenter(&self) -> Vec<f64> {
        match self {
            CenterSet::Interval { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            CenterSet::Probes { points, .. } => crate::geometry::centroid(points),
            CenterSet::Pinned { center } => center.clone(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            CenterSet::Interval { lo, hi } => {
                let d = crate::linalg::sub(hi, lo);
                let len2 = dot(&d, &d);
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (dot(&crate::linalg::sub(x, lo), &d) / len2).clamp(0.0, 1.0)
                };
                let p: Vec<f64> = lo.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                norm(&crate::linalg::sub(x, &p)) <= tol
            }
            CenterSet::Probes { extents, .. } => x
                .iter()
                .zip(extents)
                .all(|(v, (a, b))| *v >= a - tol && *v <= b + tol),
            CenterSet::Pinned { center } => norm(&crate::linalg::sub(x, center)) <= tol,
        }
    }
}

/// How the center of a leaf is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CenterRule {
    /// Midpoint of the center set.
    #[default]
    Barycenter,
    /// A fixed center, not necessarily optimal.
    Given(Vec<f64>),
}

/// Parametrized boundary ellipse `a + p cos(theta) + q sin(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseGeometry {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub area: f64,
}

/// A point of a leaf: finite, or the leaf's point on the hyperplane at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum LeafPoint {
    Finite(Vec<Complex64>),
    AtInfinity(Vec<Complex64>),
}

impl LeafPoint {
    pub fn finite(&self) -> Option<&[Complex64]> {
        match self {
            LeafPoint::Finite(z) => Some(z),
            LeafPoint::AtInfinity(_) => None,
        }
    }
}

/// Solution of the extremal problem for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalDisk {
    pub direction: DirectionAtInfinity,
    /// Scale factor relative to the raw direction vector.
    pub rho: f64,
    pub center: Vec<f64>,
    pub center_set: CenterSet,
    pub is_degenerate: bool,
    /// False when the center is the probe average used in dimension three and up.
    pub canonical_center: bool,
    /// Feasibility guarantee of the boundary ellipse: 0 for polytopes, the
    /// cutting-plane tolerance for support bodies.
    pub error_bound: f64,
}

impl ExtremalDisk {
    /// Scale factor for the canonical representative of the direction.
    pub fn rho_canonical(&self) -> f64 {
        self.rho * self.direction.lambda().norm()
    }

    /// Same leaf family with a different center.
    pub fn with_center(&self, center: Vec<f64>) -> Result<Self> {
        if center.len() != self.center.len() {
            return Err(invalid("center has the wrong dimension"));
        }
        Ok(ExtremalDisk {
            center,
            canonical_center: false,
            ..self.clone()
        })
    }

    /// `a + rho (v / zeta + conj(v) zeta)` for any nonzero `zeta`; outside the
    /// unit disk this continues the algebraic curve.
    pub fn curve_point(&self, zeta: Complex64) -> Vec<Complex64> {
        let inv = zeta.inv();
        self.direction
            .raw()
            .iter()
            .zip(&self.center)
            .map(|(v, a)| Complex64::new(*a, 0.0) + self.rho * (v * inv + v.conj() * zeta))
            .collect()
    }

    /// Leaf point at parameter `zeta`, `|zeta| <= 1`.
    pub fn leaf_eval(&self, zeta: Complex64) -> Result<LeafPoint> {
        let r = zeta.norm();
        if !r.is_finite() {
            return Err(invalid("parameter is not finite"));
        }
        if r > 1.0 + 1e-12 {
            return Err(Error::OutsideParameterDisk(r));
        }
        if r == 0.0 {
            return Ok(LeafPoint::AtInfinity(self.direction.raw().to_vec()));
        }
        Ok(LeafPoint::Finite(self.curve_point(zeta)))
    }

    pub fn geometry(&self) -> EllipseGeometry {
        let s = 2.0 * self.rho;
        let p: Vec<f64> = self.direction.re().iter().map(|x| s * x).collect();
        let q: Vec<f64> = self.direction.im().iter().map(|x| s * x).collect();
        EllipseGeometry {
            p,
            q,
            area: self.ellipse_area(),
        }
    }

    /// `a + 2 rho Re(e^{-i theta} v)`.
    pub fn boundary_ellipse_point(&self, theta: f64) -> Vec<f64> {
        let (c, s) = (theta.cos(), theta.sin());
        self.direction
            .raw()
            .iter()
            .zip(&self.center)
            .map(|(v, a)| a + 2.0 * self.rho * (v.re * c + v.im * s))
            .collect()
    }

    /// Area `4 pi rho^2 |Re v ∧ Im v|` enclosed by the boundary ellipse.
    pub fn ellipse_area(&self) -> f64 {
        4.0 * PI * self.rho * self.rho * self.direction.wedge()
    }
}

/// Tuning for the cutting-plane solver used on support-function bodies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportOptions {
    pub n_dirs: usize,
    pub refine_tol: f64,
    pub max_iters: usize,
}

impl SupportOptions {
    pub fn for_dim(n: usize) -> Self {
        SupportOptions {
            n_dirs: if n <= 2 { 64 } else { 256 },
            refine_tol: 1e-8,
            max_iters: 60,
        }
    }
}

fn check_dims(body_dim: usize, dir: &DirectionAtInfinity) -> Result<()> {
    if body_dim != dir.dim() {
        return Err(invalid("direction and body have different dimensions"));
    }
    Ok(())
}

/// Variables `(a, rho)`; maximize `rho` subject to
/// `<l_i, a> + 2 rho |<l_i, v>| <= b_i` and `rho >= 0`.
pub fn build_inclusion_lp(body: &HPolytope, dir: &DirectionAtInfinity) -> Result<LinearProgram> {
    check_dims(body.dim(), dir)?;
    inclusion_lp(body.normals(), body.offsets(), dir)
}

fn inclusion_lp(normals: &[Vec<f64>], offsets: &[f64], dir: &DirectionAtInfinity) -> Result<LinearProgram> {
    let n = dir.dim();
    let mut rows: Vec<Vec<f64>> = normals
        .iter()
        .map(|l| {
            let mut r = l.clone();
            r.push(2.0 * dir.pairing_modulus(l));
            r
        })
        .collect();
    let mut rhs = offsets.to_vec();
    let mut nonneg = vec![0.0; n + 1];
    nonneg[n] = -1.0;
    rows.push(nonneg);
    rhs.push(0.0);
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    LinearProgram::new(obj, rows, rhs)
}

fn probe(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n + 1];
    e[k] = 1.0;
    e
}

/// Center set from the optimal face of an inclusion LP.
fn face_center_set(lp: &LinearProgram, sol: &LpSolution, n: usize) -> Result<CenterSet> {
    let centers = |x: &[f64]| x[..n].to_vec();
    if n <= 2 {
        for k in 0..n {
            let ext = optimal_face_points(lp, sol, &probe(n, k))?;
            if ext.max - ext.min > SINGLETON_TOL {
                return Ok(CenterSet::Interval {
                    lo: centers(&ext.argmin),
                    hi: centers(&ext.argmax),
                });
            }
        }
        let x = centers(&sol.x);
        return Ok(CenterSet::Interval { lo: x.clone(), hi: x });
    }
    let mut extents = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(2 * n);
    for k in 0..n {
        let ext = optimal_face_points(lp, sol, &probe(n, k))?;
        extents.push((ext.min, ext.max));
        points.push(centers(&ext.argmin));
        points.push(centers(&ext.argmax));
    }
    Ok(CenterSet::Probes { extents, points })
}

fn disk_from_set(dir: &DirectionAtInfinity, rho: f64, center_set: CenterSet, error_bound: f64) -> ExtremalDisk {
    let canonical_center = match &center_set {
        CenterSet::Probes { .. } => center_set.is_singleton(SINGLETON_TOL),
        _ => true,
    };
    ExtremalDisk {
        direction: dir.clone(),
        rho,
        center: center_set.barycenter(),
        center_set,
        is_degenerate: dir.is_degenerate(),
        canonical_center,
        error_bound,
    }
}

fn solve_polytope(h: &HPolytope, dir: &DirectionAtInfinity) -> Result<ExtremalDisk> {
    let lp = build_inclusion_lp(h, dir)?;
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(degenerate("inclusion problem is infeasible")),
        LpStatus::Unbounded => return Err(degenerate("inclusion problem is unbounded")),
    }
    let rho = sol.x[h.dim()];
    if !(rho > 0.0) {
        return Err(degenerate("no ellipse of positive size fits in the body"));
    }
    let set = face_center_set(&lp, &sol, h.dim())?;
    Ok(disk_from_set(dir, rho, set, 0.0))
}

/// Maximal inscribed ellipse for the direction, with the barycentric center.
pub fn solve_extremal(body: &ConvexBody, dir: &DirectionAtInfinity) -> Result<ExtremalDisk> {
    check_dims(body.dim(), dir)?;
    match body {
        ConvexBody::Support(s) => solve_extremal_support(s, dir, &SupportOptions::for_dim(s.dim())),
        _ => solve_polytope(body.halfspaces().expect("polytope body"), dir),
    }
}

/// Cutting-plane solution of the extremal problem for a body known through
/// its support function. Bodies with a declared symmetry center have their
/// center pinned there and `rho` found by a direct one-sided search.
pub fn solve_extremal_support(
    body: &SupportBody,
    dir: &DirectionAtInfinity,
    opts: &SupportOptions,
) -> Result<ExtremalDisk> {
    check_dims(body.dim(), dir)?;
    if opts.n_dirs < 8 {
        return Err(invalid("cutting-plane solver needs at least 8 initial directions"));
    }
    if !(opts.refine_tol > 0.0) {
        return Err(invalid("refine_tol must be positive"));
    }
    let n = body.dim();
    let grid = if n == 2 { 720 } else { 2000 };
    if let Some(c) = body.symmetry_center() {
        // rho = min_u (h(u) - <u, c>) / (2 |<u, v>|).
        let c = c.to_vec();
        let ratio = |u: &[f64]| 2.0 * dir.pairing_modulus(u) / (body.eval(u) - dot(u, &c));
        let (_, best) = maximize_on_sphere(n, grid, &ratio);
        if !(best > 0.0 && best.is_finite()) {
            return Err(degenerate("symmetry center is not interior"));
        }
        return Ok(disk_from_set(dir, 1.0 / best, CenterSet::Pinned { center: c }, 0.0));
    }

    let mut dirs = direction_samples(n, opts.n_dirs);
    let mut support: Vec<f64> = dirs.iter().map(|u| body.eval(u)).collect();
    let mut last = Vec::new();
    let mut violation = f64::INFINITY;
    for iter in 0..opts.max_iters {
        let lp = inclusion_lp(&dirs, &support, dir)?;
        let sol = solve_lp(&lp)?;
        if !sol.is_optimal() {
            return Err(Error::LpStatus(sol.status));
        }
        let a = sol.x[..n].to_vec();
        let rho = sol.x[n];
        let excess = |u: &[f64]| dot(u, &a) + 2.0 * rho * dir.pairing_modulus(u) - body.eval(u);
        let (u, v) = maximize_on_sphere(n, grid, &excess);
        log::trace!("cutting plane iteration {iter}: rho {rho:.15e}, violation {v:.3e}");
        violation = v;
        last = sol.x.clone();
        if v < opts.refine_tol {
            let set = face_center_set(&lp, &sol, n)?;
            return Ok(disk_from_set(dir, rho, set, opts.refine_tol));
        }
        support.push(body.eval(&u));
        dirs.push(u);
    }
    Err(Error::Convergence {
        what: "cutting-plane extremal solver",
        residual: violation,
        last_iterate: last,
    })
}

/// Set of optimal centers for the direction.
pub fn center_set(body: &ConvexBody, dir: &DirectionAtInfinity) -> Result<CenterSet> {
    solve_extremal(body, dir).map(|d| d.center_set)
}

/// Midpoint of the center set (probe average in dimension three and up).
pub fn barycenter_center(body: &ConvexBody, dir: &DirectionAtInfinity) -> Result<Vec<f64>> {
    solve_extremal(body, dir).map(|d| d.center)
}

/// Extremal disk with the center chosen by `rule`.
pub fn solve_with_rule(body: &ConvexBody, dir: &DirectionAtInfinity, rule: &CenterRule) -> Result<ExtremalDisk> {
    let disk = solve_extremal(body, dir)?;
    match rule {
        CenterRule::Barycenter => Ok(disk),
        CenterRule::Given(a) => disk.with_center(a.clone()),
    }
}
