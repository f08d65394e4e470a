//! Independent oracles shared by the integration tests and the acceptance
//! runner. None of these call into the library's solvers.
#![allow(dead_code)]

use mongefoil_core::nalgebra::{DMatrix, DVector};
use mongefoil_core::ConvexBody;
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn square() -> ConvexBody {
    ConvexBody::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap()
}

pub fn triangle() -> ConvexBody {
    ConvexBody::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

pub fn rectangle() -> ConvexBody {
    ConvexBody::boxed(&[0.0, 0.0], &[2.0, 1.0]).unwrap()
}

pub fn hexagon() -> ConvexBody {
    ConvexBody::from_vertices(
        (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
    )
    .unwrap()
}

/// Square with three extra vertices: (1.25, 0.5), (-1.25, 0.5), (0, 1.25).
pub fn heptagon() -> ConvexBody {
    ConvexBody::from_vertices(vec![
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
        vec![1.25, 0.5],
        vec![1.0, 1.0],
        vec![0.0, 1.25],
        vec![-1.0, 1.0],
        vec![-1.25, 0.5],
    ])
    .unwrap()
}

pub fn unit_ball() -> ConvexBody {
    ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap()
}

/// Polygon inscribed in the unit circle at `k` random angles.
pub fn random_disk_polygon(rng: &mut impl Rng, k: usize) -> ConvexBody {
    let mut t: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    t.sort_by(f64::total_cmp);
    ConvexBody::from_vertices(t.iter().map(|a| vec![a.cos(), a.sin()]).collect()).unwrap()
}

/// Green function of [-1, 1] with pole at infinity, from the focal-distance
/// identity |z - 1| + |z + 1| = 2 cosh V.
pub fn green_interval(z: Complex64) -> f64 {
    let s = 0.5 * ((z - 1.0).norm() + (z + 1.0).norm());
    (s + (s * s - 1.0).max(0.0).sqrt()).ln()
}

/// Extremal function of the unit disk of R^2 from the closed form in the
/// variable t = |z|^2 + |z . z - 1|.
pub fn green_ball(z: &[Complex64]) -> f64 {
    let x2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let q: Complex64 = z.iter().map(|c| c * c).sum();
    let t = (x2 + (q - 1.0).norm()).max(1.0);
    0.5 * (t + (t * t - 1.0).sqrt()).ln()
}

/// Robin function of the unit ball: 1/2 log(2 (|v|^2 + |v . v|)).
pub fn robin_ball(v: &[Complex64]) -> f64 {
    let x2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let q: Complex64 = v.iter().map(|c| c * c).sum();
    0.5 * (2.0 * (x2 + q.norm())).ln()
}

/// Robin function of the simplex {x, y >= 0, x + y <= 1}, the limit of the
/// closed form log h(|z1| + |z2| + |z1 + z2 - 1|) for its extremal function.
pub fn robin_simplex(v: &[Complex64]) -> f64 {
    (2.0 * (v[0].norm() + v[1].norm() + (v[0] + v[1]).norm())).ln()
}

/// Extremal function of the same simplex.
pub fn green_simplex(z: &[Complex64]) -> f64 {
    let t = z[0].norm() + z[1].norm() + (z[0] + z[1] - 1.0).norm();
    let t = t.max(1.0);
    (t + (t * t - 1.0).sqrt()).ln()
}

/// Vertices of a planar polygon in counterclockwise order (angle sort about
/// the vertex average; input must be in convex position).
pub fn ccw(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|a, b| (a[1] - cy).atan2(a[0] - cx).total_cmp(&(b[1] - cy).atan2(b[0] - cx)));
    pts
}

/// Shoelace area of a closed polygon.
pub fn shoelace(pts: &[Vec<f64>]) -> f64 {
    let k = pts.len();
    0.5 * (0..k)
        .map(|i| {
            let (p, q) = (&pts[i], &pts[(i + 1) % k]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        .abs()
}

/// Half-plane description `(l, b)` with `<l, x> <= b` of a counterclockwise polygon.
pub fn polygon_edges(pts: &[Vec<f64>]) -> Vec<([f64; 2], f64)> {
    let k = pts.len();
    (0..k)
        .map(|i| {
            let (p, q) = (&pts[i], &pts[(i + 1) % k]);
            let l = [q[1] - p[1], p[0] - q[0]];
            (l, l[0] * p[0] + l[1] * p[1])
        })
        .collect()
}

/// Largest rho for the fixed direction by bisection on the existence of a
/// center (tested by a brute-force feasibility search over the vertices of
/// the center polygon, computed by pairwise line intersection).
pub fn extremal_rho_bruteforce(edges: &[([f64; 2], f64)], v: &[Complex64]) -> f64 {
    let m: Vec<f64> = edges
        .iter()
        .map(|(l, _)| {
            let re = l[0] * v[0].re + l[1] * v[1].re;
            let im = l[0] * v[0].im + l[1] * v[1].im;
            2.0 * re.hypot(im)
        })
        .collect();
    // Maximize rho over (a, rho): enumerate vertices of the 3-D polyhedron.
    let mut rows: Vec<[f64; 3]> = edges.iter().zip(&m).map(|((l, _), mi)| [l[0], l[1], *mi]).collect();
    let mut rhs: Vec<f64> = edges.iter().map(|(_, b)| *b).collect();
    rows.push([0.0, 0.0, -1.0]);
    rhs.push(0.0);
    let rows_dyn: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let (value, _) = lp_bruteforce(&[0.0, 0.0, 1.0], &rows_dyn, &rhs).expect("bounded");
    value
}

/// Maximum of `<c, x>` subject to `A x <= b` by enumerating basic feasible
/// solutions. Assumes the optimum is attained at a vertex.
pub fn lp_bruteforce(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(f64, Vec<f64>)> {
    let d = c.len();
    let m = a.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut idx: Vec<usize> = (0..d).collect();
    if m < d {
        return None;
    }
    loop {
        let mat = DMatrix::from_fn(d, d, |i, j| a[idx[i]][j]);
        let rhs = DVector::from_fn(d, |i, _| b[idx[i]]);
        if mat.determinant().abs() > 1e-12 {
            if let Some(x) = mat.lu().solve(&rhs) {
                let feasible = (0..m).all(|i| {
                    let lhs: f64 = (0..d).map(|j| a[i][j] * x[j]).sum();
                    lhs <= b[i] + 1e-9 * (1.0 + b[i].abs())
                });
                if feasible {
                    let val: f64 = (0..d).map(|j| c[j] * x[j]).sum();
                    if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
                        best = Some((val, x.iter().copied().collect()));
                    }
                }
            }
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] != i + m - d {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Random bounded feasible LP: rows spanning R^d, objective in the cone of
/// the rows, right-hand side slack at a random point.
pub fn random_lp(rng: &mut impl Rng, d: usize, m: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let a: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = a
        .iter()
        .map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum::<f64>() + rng.gen_range(0.0..1.0))
        .collect();
    let mut c = vec![0.0; d];
    for r in &a {
        let y: f64 = rng.gen_range(0.0..1.0);
        for j in 0..d {
            c[j] += y * r[j];
        }
    }
    (c, a, b)
}

pub fn random_complex(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect()
}

pub fn cdist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
