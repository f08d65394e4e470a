//! Robin function `rho_K(v) = -log rho(v)`, its sublevel set (the Robin
//! indicatrix) and the exponential map built from extremal leaves.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::extremal::{canonicalize, solve_extremal, CenterRule, DirectionAtInfinity, LeafPoint};
use crate::geometry::ConvexBody;

/// Robin values within this distance of zero count as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Largest `|rho_K(v)|` the exponential map silently corrects by rescaling.
pub const RESCALE_LIMIT: f64 = 1e-3;

const EXACT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RobinValue {
    pub value: f64,
    pub direction: DirectionAtInfinity,
    /// Extremal scale factor relative to `v`; `value = -ln(rho_used)`.
    pub rho_used: f64,
    /// Estimated absolute error of `value` (nonzero only for support bodies).
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatrixSample {
    pub v: Vec<Complex64>,
    pub robin: f64,
    pub on_boundary: bool,
    /// `t = exp(-robin)`, so that `t v` lies on the boundary.
    pub boundary_scale: f64,
}

pub fn robin_function(body: &ConvexBody, v: &[Complex64]) -> Result<RobinValue> {
    let direction = canonicalize(v)?;
    let disk = solve_extremal(body, &direction)?;
    let error_bound = if disk.error_bound > 0.0 {
        // A constraint violated by delta moves rho by about delta / (2 |<u, v>|) >= delta / (sqrt(2) |v|).
        core::f64::consts::SQRT_2 * disk.error_bound / (disk.rho * direction.norm_sqr().sqrt())
    } else {
        0.0
    };
    Ok(RobinValue {
        value: -disk.rho.ln(),
        rho_used: disk.rho,
        direction,
        error_bound,
    })
}

pub fn indicatrix_sample(body: &ConvexBody, v: &[Complex64]) -> Result<IndicatrixSample> {
    let r = robin_function(body, v)?;
    Ok(IndicatrixSample {
        v: v.to_vec(),
        robin: r.value,
        on_boundary: r.value.abs() <= BOUNDARY_TOL,
        boundary_scale: (-r.value).exp(),
    })
}

/// `rho_K(v) <= BOUNDARY_TOL`; the origin belongs to the indicatrix.
pub fn indicatrix_contains(body: &ConvexBody, v: &[Complex64]) -> Result<bool> {
    if v.len() != body.dim() {
        return Err(invalid("vector and body have different dimensions"));
    }
    if v.iter().all(|c| c.norm() == 0.0) {
        return Ok(true);
    }
    Ok(robin_function(body, v)?.value <= BOUNDARY_TOL)
}

/// `t > 0` with `rho_K(t v) = 0`.
pub fn boundary_scale(body: &ConvexBody, v: &[Complex64]) -> Result<f64> {
    Ok(robin_function(body, v)?.rho_used)
}

fn on_boundary_direction(body: &ConvexBody, v: &[Complex64]) -> Result<(Vec<Complex64>, DirectionAtInfinity, f64)> {
    let r = robin_function(body, v)?;
    let v = if r.value.abs() <= EXACT_LIMIT {
        v.to_vec()
    } else if r.value.abs() <= RESCALE_LIMIT {
        log::debug!("rescaling direction with Robin value {:.3e} onto the indicatrix boundary", r.value);
        v.iter().map(|c| c * r.rho_used).collect()
    } else {
        return Err(invalid(alloc::format!(
            "vector is not on the indicatrix boundary (Robin value {:.3e})",
            r.value
        )));
    };
    let dir = canonicalize(&v)?;
    Ok((v, dir, r.value))
}

fn pole_map(v: &[Complex64], a: Option<&[f64]>, zeta: Complex64) -> Result<LeafPoint> {
    let r = zeta.norm();
    if r > 1.0 + 1e-12 {
        return Err(crate::Error::OutsideParameterDisk(r));
    }
    if r == 0.0 {
        return Ok(LeafPoint::AtInfinity(v.to_vec()));
    }
    let inv = zeta.inv();
    Ok(LeafPoint::Finite(
        v.iter()
            .enumerate()
            .map(|(j, c)| {
                let shift = a.map_or(0.0, |a| a[j]);
                Complex64::new(shift, 0.0) + c * inv + c.conj() * zeta
            })
            .collect(),
    ))
}

/// `a(v) + v / zeta + conj(v) zeta` for `v` on the indicatrix boundary.
pub fn robin_exp_map(body: &ConvexBody, v: &[Complex64], zeta: Complex64, rule: &CenterRule) -> Result<LeafPoint> {
    let (v, dir, _) = on_boundary_direction(body, v)?;
    let a = match rule {
        CenterRule::Barycenter => solve_extremal(body, &dir)?.center,
        CenterRule::Given(a) => {
            if a.len() != v.len() {
                return Err(invalid("center has the wrong dimension"));
            }
            a.clone()
        }
    };
    pole_map(&v, Some(&a), zeta)
}

/// Center-free map `v / zeta + conj(v) zeta`.
pub fn forgetful_map(body: &ConvexBody, v: &[Complex64], zeta: Complex64) -> Result<LeafPoint> {
    let (v, _, _) = on_boundary_direction(body, v)?;
    pole_map(&v, None, zeta)
}
