//! Real convex bodies: half-space and vertex polytopes, support-function
//! bodies, and the handful of geometric operations the foliation needs.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::fmt;

use num_traits::Float;

use crate::error::{degenerate, invalid, Error, Result};
use crate::linalg::{self, combinations, norm, sub};
use crate::lp::{dot, solve_lp, LinearProgram, LpStatus};

/// Default absolute tolerance for containment tests.
pub const CONTAIN_TOL: f64 = 1e-9;

/// Relative wedge-norm threshold below which two normals count as parallel.
pub const PARALLEL_TOL: f64 = 1e-10;

const VERTEX_TOL: f64 = 1e-9;

fn check_point(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(invalid("vectors need at least one coordinate"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("vector has non-finite entries"));
    }
    Ok(())
}

/// Polytope `{x : <normal_i, x> <= offset_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl HPolytope {
    /// Validates that the polytope is bounded and has nonempty interior.
    pub fn new(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.is_empty() || normals.len() != offsets.len() {
            return Err(invalid("need one offset per normal and at least one half-space"));
        }
        let n = normals[0].len();
        for l in &normals {
            check_point(l)?;
            if l.len() != n {
                return Err(invalid("normals have inconsistent dimensions"));
            }
            if norm(l) == 0.0 {
                return Err(invalid("zero normal"));
            }
        }
        if offsets.iter().any(|b| !b.is_finite()) {
            return Err(invalid("non-finite offset"));
        }
        let p = HPolytope { normals, offsets };
        p.check_interior()?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Self {
        HPolytope { normals, offsets }
    }

    fn check_interior(&self) -> Result<()> {
        let n = self.dim();
        // Chebyshev ball: maximize r with <l, x> + r |l| <= b.
        let rows = self
            .normals
            .iter()
            .map(|l| {
                let mut r = l.clone();
                r.push(norm(l));
                r
            })
            .collect();
        let mut obj = vec![0.0; n];
        obj.push(1.0);
        let lp = LinearProgram::new(obj, rows, self.offsets.clone())?;
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Infeasible => return Err(degenerate("half-spaces have empty intersection")),
            LpStatus::Optimal if sol.value <= 1e-12 => {
                return Err(degenerate("half-space polytope has empty interior"))
            }
            _ => {}
        }
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut u = vec![0.0; n];
                u[k] = s;
                if self.support_lp(&u)?.is_none() {
                    return Err(degenerate("half-space polytope is unbounded"));
                }
            }
        }
        Ok(())
    }

    fn support_lp(&self, u: &[f64]) -> Result<Option<f64>> {
        let lp = LinearProgram::new(u.to_vec(), self.normals.clone(), self.offsets.clone())?;
        let sol = solve_lp(&lp)?;
        Ok(sol.is_optimal().then_some(sol.value))
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(l, b)| dot(l, x) <= b + tol)
    }

    /// Vertices by brute-force enumeration of `n`-subsets of constraints.
    /// In the plane they are returned counterclockwise.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out: Vec<Vec<f64>> = Vec::new();
        for subset in combinations(self.normals.len(), n) {
            let rows: Vec<Vec<f64>> = subset.iter().map(|&i| self.normals[i].clone()).collect();
            let rhs: Vec<f64> = subset.iter().map(|&i| self.offsets[i]).collect();
            let Some(x) = linalg::solve(&rows, &rhs) else {
                continue;
            };
            if self.contains(&x, VERTEX_TOL * (1.0 + norm(&x))) && !has_point(&out, &x) {
                out.push(x);
            }
        }
        if n == 2 {
            if let Ok(h) = convex_hull_2d(&out) {
                return h;
            }
        }
        out.sort_by(lex_cmp);
        out
    }
}

fn has_point(points: &[Vec<f64>], x: &[f64]) -> bool {
    points
        .iter()
        .any(|p| norm(&sub(p, x)) <= VERTEX_TOL * (1.0 + norm(x)))
}

fn lex_cmp(a: &Vec<f64>, b: &Vec<f64>) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Polytope given by its vertices; the equivalent half-space description is
/// computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    vertices: Vec<Vec<f64>>,
    halfspaces: HPolytope,
}

impl VPolytope {
    /// Deduplicates the input, drops non-extreme points and builds the facet
    /// description. Planar vertex lists come back counterclockwise starting at
    /// the lexicographically smallest vertex.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(degenerate("no vertices"));
        };
        let n = first.len();
        for p in &points {
            check_point(p)?;
            if p.len() != n {
                return Err(invalid("vertices have inconsistent dimensions"));
            }
        }
        if n == 2 {
            let (v, h) = hull_and_halfspaces_2d(&points)?;
            debug_assert_eq!(v.halfspaces, h);
            return Ok(v);
        }
        let (facets, vertices) = hull_nd(&points)?;
        let (normals, offsets) = facets.into_iter().unzip();
        Ok(VPolytope {
            vertices,
            halfspaces: HPolytope::new_unchecked(normals, offsets),
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &HPolytope {
        &self.halfspaces
    }
}

/// Support function `h_K` evaluated on unit vectors.
pub type SupportFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Convex body known only through its support function.
#[derive(Clone)]
pub struct SupportBody {
    support: SupportFn,
    dim: usize,
    smooth: bool,
    symmetry_center: Option<Vec<f64>>,
    ball: Option<(Vec<f64>, f64)>,
}

impl fmt::Debug for SupportBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportBody")
            .field("dim", &self.dim)
            .field("smooth", &self.smooth)
            .field("symmetry_center", &self.symmetry_center)
            .field("ball", &self.ball)
            .finish_non_exhaustive()
    }
}

impl SupportBody {
    /// Wraps a support oracle. Nonempty interior (`h(u) + h(-u) > 0`) and
    /// sublinearity are checked on a fixed direction sample.
    pub fn new(dim: usize, smooth: bool, support: SupportFn) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let body = SupportBody {
            support,
            dim,
            smooth,
            symmetry_center: None,
            ball: None,
        };
        body.check()?;
        Ok(body)
    }

    /// Declares that `K - c = c - K`. Extremal centers are then pinned at `c`.
    pub fn with_symmetry_center(mut self, center: Vec<f64>) -> Result<Self> {
        check_point(&center)?;
        if center.len() != self.dim {
            return Err(invalid("symmetry center has the wrong dimension"));
        }
        for u in direction_samples(self.dim, 64) {
            let neg: Vec<f64> = u.iter().map(|v| -v).collect();
            let a = self.eval(&u) - dot(&u, &center);
            let b = self.eval(&neg) + dot(&u, &center);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                return Err(invalid("support function is not symmetric about the given center"));
            }
        }
        self.symmetry_center = Some(center);
        Ok(self)
    }

    /// Euclidean ball. Smooth and symmetric about its center.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_point(&center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(degenerate("ball radius must be positive"));
        }
        let c = center.clone();
        let support: SupportFn = Arc::new(move |u: &[f64]| dot(u, &c) + radius * norm(u));
        let mut body = SupportBody::new(center.len(), true, support)?;
        body.symmetry_center = Some(center.clone());
        body.ball = Some((center, radius));
        Ok(body)
    }

    fn check(&self) -> Result<()> {
        let dirs = direction_samples(self.dim, 64);
        for u in &dirs {
            let neg: Vec<f64> = u.iter().map(|v| -v).collect();
            let (a, b) = (self.eval(u), self.eval(&neg));
            if !(a.is_finite() && b.is_finite()) {
                return Err(invalid("support oracle returned a non-finite value"));
            }
            if a + b <= 0.0 {
                return Err(degenerate("support body has empty interior"));
            }
        }
        for (i, u) in dirs.iter().enumerate() {
            let w = &dirs[(7 * i + 3) % dirs.len()];
            let sum: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + b).collect();
            if norm(&sum) < 1e-9 {
                continue;
            }
            let lhs = self.support_any(&sum);
            if lhs > self.eval(u) + self.eval(w) + 1e-9 * (1.0 + lhs.abs()) {
                return Err(invalid("support oracle is not sublinear"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn symmetry_center(&self) -> Option<&[f64]> {
        self.symmetry_center.as_deref()
    }

    /// Center and radius when the body was built by [`SupportBody::ball`].
    pub fn ball_parameters(&self) -> Option<(&[f64], f64)> {
        self.ball.as_ref().map(|(c, r)| (c.as_slice(), *r))
    }

    /// Oracle value on a unit vector.
    pub fn eval(&self, unit: &[f64]) -> f64 {
        (self.support)(unit)
    }

    /// Positively homogeneous extension; `u` must be nonzero.
    pub fn support_any(&self, u: &[f64]) -> f64 {
        let r = norm(u);
        let unit: Vec<f64> = u.iter().map(|v| v / r).collect();
        r * self.eval(&unit)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let samples = match self.dim {
            1 => 2,
            2 => 720,
            _ => 2000,
        };
        direction_samples(self.dim, samples)
            .iter()
            .all(|u| dot(u, x) <= self.eval(u) + tol)
    }
}

/// A real convex body.
#[derive(Debug, Clone)]
pub enum ConvexBody {
    HPoly(HPolytope),
    VPoly(VPolytope),
    Support(SupportBody),
}

impl ConvexBody {
    pub fn from_halfspaces(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        HPolytope::new(normals, offsets).map(ConvexBody::HPoly)
    }

    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        VPolytope::new(vertices).map(ConvexBody::VPoly)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        SupportBody::ball(center, radius).map(ConvexBody::Support)
    }

    /// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]` in half-space form.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(invalid("box bounds differ in dimension"));
        }
        let n = lo.len();
        let mut normals = Vec::with_capacity(2 * n);
        let mut offsets = Vec::with_capacity(2 * n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            normals.push(e.clone());
            offsets.push(hi[k]);
            e[k] = -1.0;
            normals.push(e);
            offsets.push(-lo[k]);
        }
        Self::from_halfspaces(normals, offsets)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::HPoly(p) => p.dim(),
            ConvexBody::VPoly(p) => p.dim(),
            ConvexBody::Support(s) => s.dim(),
        }
    }

    /// Half-space description of a polytope body.
    pub fn halfspaces(&self) -> Option<&HPolytope> {
        match self {
            ConvexBody::HPoly(p) => Some(p),
            ConvexBody::VPoly(p) => Some(p.halfspaces()),
            ConvexBody::Support(_) => None,
        }
    }

    /// Vertices of a polytope body.
    pub fn polytope_vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            ConvexBody::HPoly(p) => Some(p.vertices()),
            ConvexBody::VPoly(p) => Some(p.vertices().to_vec()),
            ConvexBody::Support(_) => None,
        }
    }

    /// Center of symmetry when it is known without computation.
    pub fn known_symmetry_center(&self) -> Option<Vec<f64>> {
        match self {
            ConvexBody::Support(s) => s.symmetry_center().map(<[f64]>::to_vec),
            _ => {
                let verts = self.polytope_vertices()?;
                let c = centroid(&verts);
                let reflected = |v: &Vec<f64>| -> Vec<f64> {
                    v.iter().zip(&c).map(|(x, m)| 2.0 * m - x).collect()
                };
                verts
                    .iter()
                    .all(|v| has_point(&verts, &reflected(v)))
                    .then_some(c)
            }
        }
    }

    /// A point in the interior (vertex average, or the symmetry center, or
    /// the midpoint of the coordinate support extents).
    pub fn interior_point(&self) -> Vec<f64> {
        if let Some(v) = self.polytope_vertices() {
            return centroid(&v);
        }
        if let Some(c) = self.known_symmetry_center() {
            return c;
        }
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                let hi = support(self, &e).unwrap_or(0.0);
                e[k] = -1.0;
                let lo = -support(self, &e).unwrap_or(0.0);
                0.5 * (hi + lo)
            })
            .collect()
    }
}

pub(crate) fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let mut c = vec![0.0; n];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    c.iter_mut().for_each(|v| *v /= points.len() as f64);
    c
}

/// Deterministic, roughly uniform unit directions.
pub fn direction_samples(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci sphere.
            let golden = PI * (3.0 - 5.0.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let mut out = Vec::with_capacity(count + 2 * dim);
            for k in 0..dim {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; dim];
                    e[k] = s;
                    out.push(e);
                }
            }
            while out.len() < count.max(2 * dim) {
                let v: Vec<f64> = (0..dim).map(|_| 2.0 * next() - 1.0).collect();
                let r = norm(&v);
                if r > 0.1 && r <= 1.0 {
                    out.push(v.iter().map(|x| x / r).collect());
                }
            }
            out
        }
    }
}

/// `h_K(u) = max_{x in K} <u, x>`.
pub fn support(body: &ConvexBody, u: &[f64]) -> Result<f64> {
    check_point(u)?;
    if u.len() != body.dim() {
        return Err(invalid("direction has the wrong dimension"));
    }
    if norm(u) == 0.0 {
        return Err(invalid("support direction must be nonzero"));
    }
    match body {
        ConvexBody::VPoly(p) => Ok(p
            .vertices()
            .iter()
            .map(|v| dot(u, v))
            .fold(f64::NEG_INFINITY, f64::max)),
        ConvexBody::HPoly(p) => p
            .support_lp(u)?
            .ok_or(Error::LpStatus(LpStatus::Unbounded)),
        ConvexBody::Support(s) => Ok(s.support_any(u)),
    }
}

/// Membership test with absolute tolerance `tol`.
pub fn contains(body: &ConvexBody, x: &[f64], tol: f64) -> bool {
    if x.len() != body.dim() {
        return false;
    }
    match body {
        ConvexBody::HPoly(p) => p.contains(x, tol),
        ConvexBody::VPoly(p) => p.halfspaces().contains(x, tol),
        ConvexBody::Support(s) => s.contains(x, tol),
    }
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone-chain hull, counterclockwise from the lexicographically smallest
/// point; collinear and duplicate points are dropped.
fn convex_hull_2d(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(lex_cmp);
    pts.dedup();
    if pts.len() < 3 {
        return Err(degenerate("fewer than three distinct points"));
    }
    let scale = pts
        .iter()
        .flatten()
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(1.0);
    let eps = 1e-14 * scale * scale;
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(degenerate("points are collinear"));
    }
    let area: f64 = (0..lower.len())
        .map(|i| {
            let (p, q) = (&lower[i], &lower[(i + 1) % lower.len()]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        * 0.5;
    if area <= 1e-12 * scale * scale {
        return Err(degenerate("hull has zero area"));
    }
    Ok(lower)
}

/// Edge half-spaces (unit outward normals) of a counterclockwise polygon.
fn polygon_halfspaces(hull: &[Vec<f64>]) -> HPolytope {
    let k = hull.len();
    let (normals, offsets) = (0..k)
        .map(|i| {
            let (p, q) = (&hull[i], &hull[(i + 1) % k]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = dx.hypot(dy);
            let l = vec![dy / len, -dx / len];
            let b = 0.5 * (dot(&l, p) + dot(&l, q));
            (l, b)
        })
        .unzip();
    HPolytope::new_unchecked(normals, offsets)
}

/// Planar convex hull together with its half-space description.
pub fn hull_and_halfspaces_2d(points: &[Vec<f64>]) -> Result<(VPolytope, HPolytope)> {
    if points.iter().any(|p| p.len() != 2) {
        return Err(invalid("planar hull needs two-dimensional points"));
    }
    for p in points {
        check_point(p)?;
    }
    let hull = convex_hull_2d(points)?;
    let h = polygon_halfspaces(&hull);
    Ok((
        VPolytope {
            vertices: hull,
            halfspaces: h.clone(),
        },
        h,
    ))
}

/// Facets `(unit normal, offset)` and extreme points of the hull of points in
/// `R^n`, by brute force over `n`-subsets.
fn hull_nd(points: &[Vec<f64>]) -> Result<(Vec<(Vec<f64>, f64)>, Vec<Vec<f64>>)> {
    let n = points[0].len();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !has_point(&pts, p) {
            pts.push(p.clone());
        }
    }
    if n == 1 {
        let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= 1e-12 {
            return Err(degenerate("interval has zero length"));
        }
        return Ok((
            vec![(vec![1.0], hi), (vec![-1.0], -lo)],
            vec![vec![lo], vec![hi]],
        ));
    }
    let diffs: Vec<Vec<f64>> = pts.iter().map(|p| sub(p, &pts[0])).collect();
    let scale = pts.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    if pts.len() < n + 1 || linalg::rank(&diffs, 1e-10 * scale) < n {
        return Err(degenerate("points do not span a full-dimensional body"));
    }
    let inner = centroid(&pts);
    let mut facets: Vec<(Vec<f64>, f64)> = Vec::new();
    for subset in combinations(pts.len(), n) {
        let base = &pts[subset[0]];
        let spans: Vec<Vec<f64>> = subset[1..].iter().map(|&i| sub(&pts[i], base)).collect();
        let mut l = linalg::orthogonal_complement(&spans);
        let r = norm(&l);
        if r <= 1e-12 * scale.powi(n as i32 - 1) {
            continue;
        }
        l.iter_mut().for_each(|v| *v /= r);
        let mut b = dot(&l, base);
        if dot(&l, &inner) > b {
            l.iter_mut().for_each(|v| *v = -*v);
            b = -b;
        }
        let tol = 1e-10 * scale;
        if pts.iter().all(|p| dot(&l, p) <= b + tol)
            && !facets
                .iter()
                .any(|(m, c)| norm(&sub(m, &l)) < 1e-9 && (c - b).abs() < 1e-9 * scale)
        {
            facets.push((l, b));
        }
    }
    let mut vertices: Vec<Vec<f64>> = pts
        .iter()
        .filter(|p| {
            let tight: Vec<Vec<f64>> = facets
                .iter()
                .filter(|(l, b)| (dot(l, p) - b).abs() <= 1e-9 * scale)
                .map(|(l, _)| l.clone())
                .collect();
            linalg::rank(&tight, 1e-9) == n
        })
        .cloned()
        .collect();
    vertices.sort_by(lex_cmp);
    Ok((facets, vertices))
}

/// A face: the intersection of the body with a supporting hyperplane,
/// represented by its extreme points.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub points: Vec<Vec<f64>>,
}

/// Two non-singleton faces on parallel supporting hyperplanes.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePair {
    pub face1: Face,
    pub face2: Face,
}

fn antiparallel(a: &[f64], b: &[f64]) -> bool {
    let (na, nb) = (norm(a), norm(b));
    let d = dot(a, b);
    let wedge = (na * na * nb * nb - d * d).max(0.0).sqrt();
    wedge <= PARALLEL_TOL * na * nb && d < 0.0
}

/// Faces of a polytope: edges in the plane, facets in higher dimension.
fn polytope_faces(body: &ConvexBody) -> Result<Vec<Face>> {
    let verts = body.polytope_vertices().ok_or_else(|| {
        Error::UnsupportedRepresentation("face detection needs a polytope".into())
    })?;
    if body.dim() == 2 {
        let (hull, h) = hull_and_halfspaces_2d(&verts)?;
        let k = hull.vertices.len();
        return Ok((0..k)
            .map(|i| Face {
                normal: h.normals[i].clone(),
                offset: h.offsets[i],
                points: vec![hull.vertices[i].clone(), hull.vertices[(i + 1) % k].clone()],
            })
            .collect());
    }
    let (facets, vertices) = hull_nd(&verts)?;
    let scale = vertices.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    Ok(facets
        .into_iter()
        .map(|(l, b)| {
            let points = vertices
                .iter()
                .filter(|v| (dot(&l, v) - b).abs() <= 1e-9 * scale)
                .cloned()
                .collect();
            Face {
                normal: l,
                offset: b,
                points,
            }
        })
        .filter(|f| f.points.len() >= 2)
        .collect())
}

/// All pairs of non-singleton faces lying on parallel supporting
/// hyperplanes. An empty list certifies that every direction at infinity
/// has a unique extremal disk. In dimension three and up only facets are
/// examined.
pub fn detect_parallel_faces(body: &ConvexBody) -> Result<Vec<FacePair>> {
    let faces = polytope_faces(body)?;
    let mut pairs = Vec::new();
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            if antiparallel(&faces[i].normal, &faces[j].normal) {
                pairs.push(FacePair {
                    face1: faces[i].clone(),
                    face2: faces[j].clone(),
                });
            }
        }
    }
    Ok(pairs)
}

/// Difference body `(K - K) / 2`.
pub fn symmetrize(body: &ConvexBody) -> Result<ConvexBody> {
    let verts = body.polytope_vertices().ok_or_else(|| {
        Error::UnsupportedRepresentation("symmetrization needs a polytope".into())
    })?;
    let mut diffs = Vec::with_capacity(verts.len() * verts.len());
    for a in &verts {
        for b in &verts {
            diffs.push(a.iter().zip(b).map(|(x, y)| 0.5 * (x - y)).collect::<Vec<f64>>());
        }
    }
    ConvexBody::from_vertices(diffs)
}

/// Image `{M x + t : x in K}` under an invertible affine map.
pub fn affine_image(body: &ConvexBody, m: &[Vec<f64>], t: &[f64]) -> Result<ConvexBody> {
    let n = body.dim();
    if m.len() != n || m.iter().any(|r| r.len() != n) || t.len() != n {
        return Err(invalid("affine map has the wrong shape"));
    }
    let m_inv = linalg::inverse(m).ok_or_else(|| invalid("affine map is singular"))?;
    match body {
        ConvexBody::VPoly(p) => {
            let verts = p
                .vertices()
                .iter()
                .map(|v| {
                    linalg::mat_vec(m, v)
                        .iter()
                        .zip(t)
                        .map(|(a, b)| a + b)
                        .collect()
                })
                .collect();
            ConvexBody::from_vertices(verts)
        }
        ConvexBody::HPoly(p) => {
            // <l, x> <= b  becomes  <M^{-T} l, y> <= b + <M^{-T} l, t>.
            let m_inv_t = linalg::transpose(&m_inv);
            let (normals, offsets): (Vec<Vec<f64>>, Vec<f64>) = p
                .normals()
                .iter()
                .zip(p.offsets())
                .map(|(l, b)| {
                    let l2 = linalg::mat_vec(&m_inv_t, l);
                    let b2 = b + dot(&l2, t);
                    (l2, b2)
                })
                .unzip();
            ConvexBody::from_halfspaces(normals, offsets)
        }
        ConvexBody::Support(s) => {
            let mt = linalg::transpose(m);
            let shift = t.to_vec();
            let inner = s.clone();
            let f: SupportFn = Arc::new(move |u: &[f64]| {
                inner.support_any(&linalg::mat_vec(&mt, u)) + dot(u, &shift)
            });
            let mut image = SupportBody::new(n, s.is_smooth(), f)?;
            if let Some(c) = s.symmetry_center() {
                let c2: Vec<f64> = linalg::mat_vec(m, c).iter().zip(t).map(|(a, b)| a + b).collect();
                image = image.with_symmetry_center(c2)?;
            }
            Ok(ConvexBody::Support(image))
        }
    }
}

/// Distance-like measure of how far a complex point lies from `K`:
/// `|Im z| + max(0, max_i (<l_i, Re z> - b_i) / |l_i|)`.
pub fn exterior_margin(body: &ConvexBody, re: &[f64], im: &[f64]) -> f64 {
    let im_norm = norm(im);
    let outside = match body.halfspaces() {
        Some(h) => h
            .normals()
            .iter()
            .zip(h.offsets())
            .map(|(l, b)| (dot(l, re) - b) / norm(l))
            .fold(0.0, f64::max),
        None => {
            let ConvexBody::Support(s) = body else { unreachable!() };
            let samples = if s.dim() == 2 { 720 } else { 2000 };
            direction_samples(s.dim(), samples)
                .iter()
                .map(|u| dot(u, re) - s.eval(u))
                .fold(0.0, f64::max)
        }
    };
    im_norm + outside
}
