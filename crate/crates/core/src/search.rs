//! Derivative-free maximization on the unit sphere, used to find the most
//! violated support constraint of a candidate ellipse.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::direction_samples;
use crate::linalg::norm;
use crate::lp::dot;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[a, b]`; returns `(argmax, max)`.
pub(crate) fn golden_max(mut a: f64, mut b: f64, tol: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Orthonormal basis of the tangent space at the unit vector `u`.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        let mut t: Vec<f64> = (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
        for b in core::iter::once(u).chain(basis.iter().map(Vec::as_slice)) {
            let c = dot(&t, b);
            t.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let r = norm(&t);
        if r > 1e-6 {
            t.iter_mut().for_each(|x| *x /= r);
            basis.push(t);
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

fn rotate(u: &[f64], t: &[f64], s: f64) -> Vec<f64> {
    let (c, sn) = (s.cos(), s.sin());
    let mut w: Vec<f64> = u.iter().zip(t).map(|(a, b)| c * a + sn * b).collect();
    let r = norm(&w);
    w.iter_mut().for_each(|x| *x /= r);
    w
}

/// Approximate global maximizer of `f` over unit vectors of `R^n`: a grid of
/// `grid` directions followed by golden-section polishing of the best few.
pub(crate) fn maximize_on_sphere(n: usize, grid: usize, f: &impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let samples = direction_samples(n, grid);
    let mut scored: Vec<(f64, usize)> = samples.iter().enumerate().map(|(i, u)| (f(u), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    if n == 1 {
        let (v, i) = scored[0];
        return (samples[i].clone(), v);
    }
    let spacing = if n == 2 {
        2.0 * PI / grid as f64
    } else {
        (4.0 * PI / grid as f64).sqrt() * 1.5
    };
    let mut best = (samples[scored[0].1].clone(), scored[0].0);
    for &(_, i) in scored.iter().take(4) {
        let mut u = samples[i].clone();
        let mut fu = f(&u);
        if n == 2 {
            let t0 = u[1].atan2(u[0]);
            let (t, v) = golden_max(t0 - spacing, t0 + spacing, 1e-13, &mut |t: f64| {
                f(&[t.cos(), t.sin()])
            });
            if v >= fu {
                u = alloc::vec![t.cos(), t.sin()];
                fu = v;
            }
        } else {
            let mut delta = spacing;
            for _ in 0..80 {
                let before = fu;
                for t in tangent_basis(&u) {
                    let (s, v) = golden_max(-delta, delta, delta * 1e-9, &mut |s: f64| f(&rotate(&u, &t, s)));
                    if v > fu {
                        u = rotate(&u, &t, s);
                        fu = v;
                    }
                }
                if fu - before <= 1e-15 * (1.0 + fu.abs()) {
                    delta *= 0.5;
                }
                if delta < 1e-11 {
                    break;
                }
            }
        }
        if fu > best.1 {
            best = (u, fu);
        }
    }
    best
}
