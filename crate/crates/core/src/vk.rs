//! The extremal function `V_K`, evaluated by locating the leaf of the
//! barycentric foliation through a point, together with closed-form values
//! for intervals, balls and boxes.
//!
//! Leaves are searched in the chart `w = rho(v) v / zeta`: the leaf point is
//! `F(w) = b(w) + w + rho(w)^2 conj(w)` and `V_K(F(w)) = -ln rho(w)`, where
//! `rho(w)` is the extremal scale for the direction `w` and `b(w)` the
//! barycentric center. The map is two-to-one (`w` and `rho(w)^2 conj(w)` give
//! the same point), so any solution can be folded onto the sheet `rho <= 1`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::extremal::{canonicalize, solve_extremal, DirectionAtInfinity};
use crate::geometry::{contains, ConvexBody};

#[derive(Debug, Clone, PartialEq)]
pub struct LeafCoordinates {
    pub direction: DirectionAtInfinity,
    /// Parameter on the leaf of the canonical direction, `0 < |zeta| <= 1`.
    pub zeta: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStatus {
    Converged,
    Fallback,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    /// `None` for points of `K`.
    pub leaf: Option<LeafCoordinates>,
    /// `|f(zeta) - z|` for the reported leaf.
    pub residual: f64,
    pub status: EvalStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VkOptions {
    pub starts: usize,
    pub newton_iters: usize,
    pub fd_step: f64,
    /// Newton stops early once the residual is below this.
    pub tol: f64,
    /// Real points within this distance of `K` count as points of `K`.
    pub contain_tol: f64,
    /// Allow evaluation in dimension three and up.
    pub experimental: bool,
}

impl Default for VkOptions {
    fn default() -> Self {
        VkOptions {
            starts: 8,
            newton_iters: 40,
            fd_step: 1e-6,
            tol: 1e-10,
            contain_tol: 1e-10,
            experimental: false,
        }
    }
}

/// Accepted residual relative to the size of the target point.
pub fn accepted_residual(z: &[Complex64]) -> f64 {
    1e-8 * (1.0 + cnorm(z))
}

fn cnorm(z: &[Complex64]) -> f64 {
    z.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|j| Complex64::new(x[j], x[n + j])).collect()
}

fn to_real(w: &[Complex64]) -> Vec<f64> {
    w.iter().map(|c| c.re).chain(w.iter().map(|c| c.im)).collect()
}

struct LeafMap<'a> {
    body: &'a ConvexBody,
    z: &'a [Complex64],
}

struct Sample {
    residual: Vec<f64>,
    norm: f64,
    rho: f64,
}

impl LeafMap<'_> {
    fn eval(&self, x: &[f64]) -> Option<Sample> {
        let w = to_complex(x);
        let dir = canonicalize(&w).ok()?;
        let disk = solve_extremal(self.body, &dir).ok()?;
        let r2 = disk.rho * disk.rho;
        let f: Vec<Complex64> = w
            .iter()
            .zip(&disk.center)
            .map(|(wj, a)| Complex64::new(*a, 0.0) + wj + r2 * wj.conj())
            .collect();
        let d: Vec<Complex64> = f.iter().zip(self.z).map(|(a, b)| a - b).collect();
        let residual = to_real(&d);
        let norm = cnorm(&d);
        norm.is_finite().then_some(Sample {
            residual,
            norm,
            rho: disk.rho,
        })
    }

    fn jacobian(&self, x: &[f64], step: f64) -> Option<DMatrix<f64>> {
        let m = x.len();
        let h = step * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
        let mut jac = DMatrix::zeros(m, m);
        let mut xp = x.to_vec();
        for k in 0..m {
            xp[k] = x[k] + h;
            let fp = self.eval(&xp)?;
            xp[k] = x[k] - h;
            let fm = self.eval(&xp)?;
            xp[k] = x[k];
            for i in 0..m {
                jac[(i, k)] = (fp.residual[i] - fm.residual[i]) / (2.0 * h);
            }
        }
        Some(jac)
    }
}

fn newton(map: &LeafMap, x0: Vec<f64>, opts: &VkOptions) -> Option<(Vec<f64>, Sample)> {
    let mut x = x0;
    let mut cur = map.eval(&x)?;
    let mut polish = 0;
    for _ in 0..opts.newton_iters {
        if cur.norm <= opts.tol {
            polish += 1;
            if polish > 2 {
                break;
            }
        }
        let jac = map.jacobian(&x, opts.fd_step)?;
        let rhs = -DVector::from_column_slice(&cur.residual);
        let step = jac.clone().lu().solve(&rhs).or_else(|| jac.svd(true, true).solve(&rhs, 1e-14).ok())?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            if let Some(s) = map.eval(&trial) {
                if s.norm < cur.norm {
                    x = trial;
                    cur = s;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((x, cur))
}

/// Levenberg-Marquardt on the squared residual.
fn least_squares(map: &LeafMap, x0: Vec<f64>, opts: &VkOptions) -> Option<(Vec<f64>, Sample)> {
    let mut x = x0;
    let mut cur = map.eval(&x)?;
    let mut mu = 1e-3;
    for _ in 0..200 {
        if cur.norm <= opts.tol {
            break;
        }
        let jac = map.jacobian(&x, opts.fd_step)?;
        let r = DVector::from_column_slice(&cur.residual);
        let jt = jac.transpose();
        let g = &jt * &r;
        let jtj = &jt * &jac;
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            if let Some(d) = a.lu().solve(&(-&g)) {
                let trial: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + b).collect();
                if let Some(s) = map.eval(&trial) {
                    if s.norm < cur.norm {
                        x = trial;
                        cur = s;
                        mu = (mu * 0.3).max(1e-12);
                        improved = true;
                        break;
                    }
                }
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Some((x, cur))
}

fn is_real_point_of(body: &ConvexBody, z: &[Complex64], tol: f64) -> bool {
    let re: Vec<f64> = z.iter().map(|c| c.re).collect();
    z.iter().all(|c| c.im.abs() <= tol) && contains(body, &re, tol)
}

fn leaf_from(body: &ConvexBody, x: &[f64], rho: f64) -> Result<(LeafCoordinates, f64)> {
    let mut w = to_complex(x);
    let mut rho = rho;
    if rho > 1.0 {
        w = w.iter().map(|c| rho * rho * c.conj()).collect();
        rho = solve_extremal(body, &canonicalize(&w)?)?.rho;
    }
    let raw = canonicalize(&w)?;
    let lambda = raw.lambda();
    let zeta = Complex64::new(rho * lambda.norm(), 0.0) / lambda;
    let direction = canonicalize(raw.canonical())?;
    Ok((LeafCoordinates { direction, zeta }, -rho.ln()))
}

/// `V_K(z)` by inverting the foliation. Points of `K` return 0 with status
/// [`EvalStatus::Boundary`].
pub fn vk_eval(body: &ConvexBody, z: &[Complex64], opts: &VkOptions) -> Result<EvalResult> {
    let n = body.dim();
    if z.len() != n {
        return Err(invalid("point and body have different dimensions"));
    }
    if z.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(invalid("point has non-finite coordinates"));
    }
    if n > 2 && !opts.experimental {
        return Err(invalid("extremal function evaluation is limited to dimension two"));
    }
    if is_real_point_of(body, z, opts.contain_tol) {
        return Ok(EvalResult {
            value: 0.0,
            leaf: None,
            residual: 0.0,
            status: EvalStatus::Boundary,
        });
    }
    let map = LeafMap { body, z };
    let center = body.interior_point();
    let base: Vec<Complex64> = z.iter().zip(&center).map(|(a, c)| a - c).collect();
    let accept = accepted_residual(z);
    let mut best: Option<(Vec<f64>, Sample)> = None;
    for k in 0..opts.starts.max(1) {
        let factor = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            let t = 2.0 * core::f64::consts::PI * k as f64 / opts.starts as f64;
            Complex64::new(0.6, 0.0) + Complex64::from_polar(0.4, t)
        };
        let x0 = to_real(&base.iter().map(|c| c * factor).collect::<Vec<_>>());
        let Some((x, s)) = newton(&map, x0, opts) else {
            continue;
        };
        log::trace!("start {k}: residual {:.3e}", s.norm);
        let done = s.norm <= opts.tol;
        if best.as_ref().is_none_or(|(_, b)| s.norm < b.norm) {
            best = Some((x, s));
        }
        if done {
            break;
        }
    }
    let (mut status, mut found) = (EvalStatus::Converged, best);
    if found.as_ref().is_none_or(|(_, s)| s.norm > accept) {
        let x0 = found.as_ref().map_or_else(|| to_real(&base), |(x, _)| x.clone());
        if let Some(lm) = least_squares(&map, x0, opts) {
            if found.as_ref().is_none_or(|(_, s)| lm.1.norm < s.norm) {
                found = Some(lm);
                status = EvalStatus::Fallback;
            }
        }
    }
    match found {
        Some((x, s)) if s.norm <= accept => {
            let (leaf, value) = leaf_from(body, &x, s.rho)?;
            Ok(EvalResult {
                value,
                leaf: Some(leaf),
                residual: s.norm,
                status,
            })
        }
        Some((x, s)) => Err(Error::Convergence {
            what: "leaf inversion",
            residual: s.norm,
            last_iterate: x,
        }),
        None => Err(Error::Convergence {
            what: "leaf inversion",
            residual: f64::INFINITY,
            last_iterate: to_real(&base),
        }),
    }
}

/// `log |z + sqrt(z^2 - 1)|` with the branch of modulus at least 1; the
/// extremal function of `[-1, 1]`.
pub fn vk_interval(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re.abs() <= 1.0 {
        return 0.0;
    }
    let s = (z * z - 1.0).sqrt();
    (z + s).norm().max((z - s).norm()).ln().max(0.0)
}

/// Closed form for the real Euclidean ball:
/// `1/2 log h(|x|^2 + |x . x - 1|)` in normalized coordinates `x = (z - c) / r`,
/// with `h(t) = t + sqrt(t^2 - 1)`.
pub fn vk_ball(z: &[Complex64], center: &[f64], radius: f64) -> Result<f64> {
    if z.len() != center.len() {
        return Err(invalid("point and center have different dimensions"));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius must be positive"));
    }
    let x: Vec<Complex64> = z.iter().zip(center).map(|(a, c)| (a - c) / radius).collect();
    let sq: f64 = x.iter().map(Complex64::norm_sqr).sum();
    let dot: Complex64 = x.iter().map(|c| c * c).sum();
    let t = (sq + (dot - 1.0).norm()).max(1.0);
    Ok(0.5 * (t + (t * t - 1.0).sqrt()).ln())
}

/// Extremal function of a product set from the values of its factors.
pub fn vk_product(values: &[f64]) -> Result<f64> {
    values
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or_else(|| invalid("product needs at least one factor"))
}

/// `V_K(z) = 1/2 V_{P(K)}(P(z))` for the coordinatewise square map
/// `P(z) = (z_1^2, ..., z_n^2)`; `base` is `P(K)`.
pub fn vk_pullback(base: &ConvexBody, z: &[Complex64], opts: &VkOptions) -> Result<f64> {
    let pz: Vec<Complex64> = z.iter().map(|c| c * c).collect();
    Ok(0.5 * vk_eval(base, &pz, opts)?.value)
}

/// Normalized Monge-Ampere defect `|det L| / s^2` of the complex Hessian `L`
/// of `f` at `z` (dimension two), by central differences with step `h`.
///
/// The scale is `s = max(tr L, |df|^2)`. The gradient term keeps the ratio
/// meaningful where `L` itself vanishes (products of intervals, where `V_K`
/// is pluriharmonic off the corner locus); both terms scale like `1/|z|^2`.
pub fn ma_residual_with(mut f: impl FnMut(&[Complex64]) -> Result<f64>, z: &[Complex64], h: f64) -> Result<f64> {
    if z.len() != 2 {
        return Err(invalid("Monge-Ampere residual is implemented for dimension two"));
    }
    if !(h > 0.0) {
        return Err(invalid("step must be positive"));
    }
    let x0 = to_real(z);
    let mut at = |d: &[(usize, f64)]| -> Result<f64> {
        let mut x = x0.clone();
        for &(k, s) in d {
            x[k] += s * h;
        }
        f(&to_complex(&x))
    };
    // Real coordinates ordered (x1, x2, y1, y2).
    let f0 = at(&[])?;
    let mut second = [[0.0f64; 4]; 4];
    let mut grad_sq = 0.0;
    for k in 0..4 {
        let (fp, fm) = (at(&[(k, 1.0)])?, at(&[(k, -1.0)])?);
        second[k][k] = (fp - 2.0 * f0 + fm) / (h * h);
        grad_sq += ((fp - fm) / (2.0 * h)).powi(2);
    }
    for (a, b) in [(0, 1), (2, 3), (0, 3), (2, 1)] {
        let v = (at(&[(a, 1.0), (b, 1.0)])? - at(&[(a, 1.0), (b, -1.0)])? - at(&[(a, -1.0), (b, 1.0)])?
            + at(&[(a, -1.0), (b, -1.0)])?)
            / (4.0 * h * h);
        second[a][b] = v;
        second[b][a] = v;
    }
    let (x, y) = ([0, 1], [2, 3]);
    let entry = |j: usize, k: usize| {
        Complex64::new(
            second[x[j]][x[k]] + second[y[j]][y[k]],
            second[x[j]][y[k]] - second[y[j]][x[k]],
        ) * 0.25
    };
    let l = [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]];
    let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
    // |df/dz_j|^2 = (f_x^2 + f_y^2) / 4
    let scale = (l[0][0] + l[1][1]).re.abs().max(0.25 * grad_sq);
    if scale == 0.0 {
        return Ok(det.norm());
    }
    Ok(det.norm() / (scale * scale))
}

/// [`ma_residual_with`] applied to [`vk_eval`].
pub fn ma_residual(body: &ConvexBody, z: &[Complex64], h: f64, opts: &VkOptions) -> Result<f64> {
    ma_residual_with(|p| vk_eval(body, p, opts).map(|r| r.value), z, h)
}
