//! Seeded invariant checks run by `mongefoil verify`.

use std::f64::consts::TAU;

use anyhow::Result;
use mongefoil_core::disjoint::leaf_disjointness_check;
use mongefoil_core::extremal::{build_inclusion_lp, canonicalize, solve_extremal, CenterRule, ExtremalDisk};
use mongefoil_core::geometry::{contains, support, symmetrize};
use mongefoil_core::lp::{solve_lp, LinearProgram, LpStatus};
use mongefoil_core::robin::{forgetful_map, robin_function};
use mongefoil_core::vk::{accepted_residual, vk_ball, vk_eval, vk_interval, VkOptions};
use mongefoil_core::ConvexBody;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::BodySpec;
use crate::commands::{random_directions, Loaded};
use crate::Suite;

#[derive(Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation (or count of failures for boolean checks).
    pub worst: f64,
    pub tol: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Suites<'a> {
    loaded: &'a Loaded,
    seed: u64,
    opts: VkOptions,
    checks: Vec<Check>,
}

/// Largest deviation over samples; the first error aborts the check.
type Sampled = core::result::Result<f64, String>;

impl Suites<'_> {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn body(&self) -> &ConvexBody {
        &self.loaded.body
    }

    fn record(&mut self, suite: &'static str, name: &'static str, tol: f64, samples: usize, worst: Sampled) {
        let (worst, error) = match worst {
            Ok(w) => (w, None),
            Err(e) => (f64::NAN, Some(e)),
        };
        self.checks.push(Check {
            suite,
            name,
            passed: error.is_none() && worst <= tol,
            worst,
            tol,
            samples,
            error,
        });
    }

    fn directions(&self, salt: u64, count: usize) -> Vec<Vec<Complex64>> {
        random_directions(&mut self.rng(salt), self.body().dim(), count)
    }

    /// Random points of `([-3, 3] + i [-1, 1])^n` scaled to the body.
    fn points(&self, salt: u64, count: usize) -> Vec<Vec<Complex64>> {
        let mut rng = self.rng(salt);
        let n = self.body().dim();
        let c = self.body().interior_point();
        let scale = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                support(self.body(), &e).unwrap_or(1.0) - c[k]
            })
            .fold(0.0, f64::max)
            .max(1e-3);
        (0..count)
            .map(|_| {
                (0..n)
                    .map(|k| Complex64::new(c[k] + scale * rng.gen_range(-3.0..3.0), scale * rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect()
    }

    fn lp(&mut self) {
        let mut rng = self.rng(1);
        let worst = (|| -> Sampled {
            let mut worst = 0.0f64;
            for _ in 0..200 {
                let d = rng.gen_range(1..=3);
                let m = rng.gen_range(d..=8);
                worst = worst.max(kkt_gap(&random_lp(&mut rng, d, m))?);
            }
            Ok(worst)
        })();
        self.record("lp", "random LP optimality certificate", 1e-8, 200, worst);

        let Some(h) = self.body().halfspaces().cloned() else {
            return;
        };
        let dirs = self.directions(2, 50);
        let worst = dirs.iter().try_fold(0.0f64, |w, v| {
            let d = canonicalize(v).map_err(|e| e.to_string())?;
            let lp = build_inclusion_lp(&h, &d).map_err(|e| e.to_string())?;
            Ok(w.max(kkt_gap(&lp)?))
        });
        self.record("lp", "inclusion LP optimality certificate", 1e-8, dirs.len(), worst);
    }

    fn extremal(&mut self) {
        let dirs = self.directions(3, 50);
        let body = self.body().clone();
        let solved: core::result::Result<Vec<_>, String> = dirs
            .iter()
            .map(|v| {
                let d = canonicalize(v).map_err(|e| e.to_string())?;
                solve_extremal(&body, &d).map_err(|e| e.to_string())
            })
            .collect();
        let solved = match solved {
            Ok(s) => s,
            Err(e) => {
                self.record("extremal", "solve", 0.0, dirs.len(), Err(e));
                return;
            }
        };

        let outside = solved
            .iter()
            .map(|d| {
                (0..720)
                    .filter(|k| !contains(&body, &d.boundary_ellipse_point(TAU * *k as f64 / 720.0), 1e-8 + d.error_bound))
                    .count()
            })
            .sum::<usize>();
        self.record("extremal", "boundary ellipse inside K (points outside)", 0.0, solved.len() * 720, Ok(outside as f64));

        // Grown ellipse at the same center must leave K somewhere.
        let stuck = solved
            .iter()
            .filter(|d| {
                let mut grown = (*d).clone();
                grown.rho *= 1.0 + 1e-6;
                ellipse_excess(&body, &grown) <= 0.0
            })
            .count();
        self.record("extremal", "scale maximal (grown ellipses still inside)", 0.0, solved.len(), Ok(stuck as f64));

        let off = solved.iter().filter(|d| !d.center_set.contains(&d.center, 1e-9)).count();
        self.record("extremal", "center in center set (misses)", 0.0, solved.len(), Ok(off as f64));

        let worst = solved.iter().try_fold(0.0f64, |w, d| {
            let c = solve_extremal(&body, &d.direction.conj()).map_err(|e| e.to_string())?;
            Ok(w.max((c.rho - d.rho).abs() / d.rho))
        });
        self.record("extremal", "conjugate direction has the same scale", 1e-10, solved.len(), worst);

        let mut rng = self.rng(4);
        let worst = solved.iter().zip(&dirs).try_fold(0.0f64, |w, (d, v)| {
            let lambda = Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(0.0..TAU));
            let scaled: Vec<Complex64> = v.iter().map(|c| c * lambda).collect();
            let s = solve_extremal(&body, &canonicalize(&scaled).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            Ok(w.max((s.rho * lambda.norm() - d.rho).abs() / d.rho))
        });
        self.record("extremal", "scale covariance", 1e-9, solved.len(), worst);

        let worst = solved
            .iter()
            .filter(|d| !d.is_degenerate)
            .map(|d| {
                let pts: Vec<Vec<f64>> = (0..8192).map(|k| d.boundary_ellipse_point(TAU * k as f64 / 8192.0)).collect();
                let area = polygon_area(&pts);
                (d.ellipse_area() - area).abs() / area
            })
            .fold(0.0, f64::max);
        self.record("extremal", "ellipse area vs polygon area", 1e-6, solved.len(), Ok(worst));
    }

    fn robin(&mut self) {
        let dirs = self.directions(5, 50);
        let body = self.body().clone();
        let rho = |v: &[Complex64]| robin_function(&body, v).map(|r| r.value).map_err(|e| e.to_string());
        let mut rng = self.rng(6);

        let worst = dirs.iter().try_fold(0.0f64, |w, v| {
            let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
            let rot: Vec<Complex64> = v.iter().map(|c| c * phase).collect();
            Ok(w.max((rho(v)? - rho(&rot)?).abs()))
        });
        self.record("robin", "circle invariance", 1e-10, dirs.len(), worst);

        let worst = dirs.iter().try_fold(0.0f64, |w, v| {
            let t: f64 = rng.gen_range(0.1..10.0);
            let scaled: Vec<Complex64> = v.iter().map(|c| c * t).collect();
            Ok(w.max((rho(&scaled)? - rho(v)? - t.ln()).abs()))
        });
        self.record("robin", "logarithmic homogeneity", 1e-9, dirs.len(), worst);

        let worst = dirs.iter().try_fold(0.0f64, |w, v| {
            let vc: Vec<Complex64> = v.iter().map(|c| c.conj()).collect();
            Ok(w.max((rho(v)? - rho(&vc)?).abs()))
        });
        self.record("robin", "conjugation invariance", 1e-10, dirs.len(), worst);

        if let BodySpec::Ball { radius, .. } = &self.loaded.spec {
            let r = *radius;
            let worst = dirs.iter().try_fold(0.0f64, |w, v| {
                let x2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                let q: Complex64 = v.iter().map(|c| c * c).sum();
                let expect = 0.5 * (2.0 * (x2 + q.norm())).ln() - r.ln();
                Ok(w.max((rho(v)? - expect).abs()))
            });
            self.record("robin", "ball closed form", 1e-7, dirs.len(), worst);
        }

        let Ok(sym) = symmetrize(&body) else {
            return;
        };
        let rho_sym = |v: &[Complex64]| robin_function(&sym, v).map(|r| r.value).map_err(|e| e.to_string());
        let worst = dirs.iter().try_fold(0.0f64, |w, v| Ok(w.max(rho_sym(v)? - rho(v)?)));
        self.record("robin", "symmetrization lowers the Robin function", 1e-9, dirs.len(), worst.map(|w| w.max(0.0)));

        let worst = (0..50).try_fold(0.0f64, |w, _| {
            let u: Vec<Complex64> = (0..body.dim()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
            Ok(w.max((rho_sym(&u)? - rho(&u)?).abs()))
        });
        self.record("robin", "symmetrization agrees on real directions", 1e-9, 50, worst);

        let outside = dirs.iter().try_fold(0usize, |n, v| {
            let t = robin_function(&body, v).map_err(|e| e.to_string())?.rho_used;
            let w: Vec<Complex64> = v.iter().map(|c| c * t).collect();
            let mut count = n;
            for k in 0..16 {
                let p = forgetful_map(&body, &w, Complex64::from_polar(1.0, TAU * k as f64 / 16.0)).map_err(|e| e.to_string())?;
                let re: Vec<f64> = p.finite().unwrap_or(&[]).iter().map(|c| c.re).collect();
                if !contains(&sym, &re, 1e-8) {
                    count += 1;
                }
            }
            Ok(count)
        });
        self.record("robin", "centered ellipses inside the symmetrization (points outside)", 0.0, dirs.len() * 16, outside.map(|n| n as f64));
    }

    fn vk(&mut self) {
        if self.body().dim() != 2 {
            self.record("vk", "dimension two", 0.0, 0, Err("leaf inversion needs a planar body".into()));
            return;
        }
        let body = self.body().clone();
        let opts = self.opts;
        let value = |z: &[Complex64]| vk_eval(&body, z, &opts).map_err(|e| format!("z={z:?}: {e}"));

        let dirs = self.directions(7, 30);
        let mut rng = self.rng(8);
        let worst = dirs.iter().try_fold(0.0f64, |w, v| {
            let d = solve_extremal(&body, &canonicalize(v).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let zeta = Complex64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(0.0..TAU));
            Ok(w.max((value(&d.curve_point(zeta))?.value + zeta.norm().ln()).abs()))
        });
        self.record("vk", "harmonic along leaves", 1e-6, dirs.len(), worst);

        let pts = self.points(9, 30);
        let worst = pts.iter().try_fold(0.0f64, |w, z| {
            let r = value(z)?;
            Ok(w.max(r.residual / accepted_residual(z)))
        });
        self.record("vk", "inversion residual (relative to accepted)", 1.0, pts.len(), worst);

        let worst = pts.iter().try_fold(0.0f64, |w, z| {
            let zc: Vec<Complex64> = z.iter().map(|c| c.conj()).collect();
            Ok(w.max((value(z)?.value - value(&zc)?.value).abs()))
        });
        self.record("vk", "conjugation invariance", 1e-8, pts.len(), worst);

        let oracle: Option<Box<dyn Fn(&[Complex64]) -> f64>> = match &self.loaded.spec {
            BodySpec::Ball { center, radius } => {
                let (c, r) = (center.clone(), *radius);
                Some(Box::new(move |z: &[Complex64]| vk_ball(z, &c, r).unwrap_or(f64::NAN)))
            }
            _ => axis_box(&body).map(|(lo, hi)| {
                Box::new(move |z: &[Complex64]| {
                    z.iter()
                        .zip(lo.iter().zip(&hi))
                        .map(|(x, (a, b))| vk_interval((x - 0.5 * (a + b)) / (0.5 * (b - a))))
                        .fold(0.0, f64::max)
                }) as Box<dyn Fn(&[Complex64]) -> f64>
            }),
        };
        if let Some(oracle) = oracle {
            let worst = pts.iter().try_fold(0.0f64, |w, z| Ok(w.max((value(z)?.value - oracle(z)).abs())));
            self.record("vk", "closed-form oracle", 1e-6, pts.len(), worst);
        }
    }

    fn foliation(&mut self) {
        if self.body().dim() != 2 {
            self.record("foliation", "dimension two", 0.0, 0, Err("leaf intersection needs a planar body".into()));
            return;
        }
        let body = self.body().clone();
        let dirs = self.directions(10, 400);
        let met = dirs.chunks(2).try_fold(0usize, |n, pair| {
            let d1 = canonicalize(&pair[0]).map_err(|e| e.to_string())?;
            let d2 = canonicalize(&pair[1]).map_err(|e| e.to_string())?;
            let rep = leaf_disjointness_check(&body, &d1, &d2, &CenterRule::Barycenter, 40).map_err(|e| e.to_string())?;
            Ok(n + usize::from(!rep.disjoint()))
        });
        self.record("foliation", "barycentric leaves disjoint outside K (pairs meeting)", 0.0, 200, met.map(|n| n as f64));
    }
}

/// Largest `<u, a> + 2 rho |<u, v>| - h_K(u)` over unit `u`: positive iff the
/// boundary ellipse leaves `K`. Planar bodies are searched on a fine circle
/// grid refined by golden section; otherwise ellipse points are tested.
fn ellipse_excess(body: &ConvexBody, d: &ExtremalDisk) -> f64 {
    if body.dim() != 2 {
        let outside = (0..8192).any(|k| !contains(body, &d.boundary_ellipse_point(TAU * k as f64 / 8192.0), 0.0));
        return if outside { 1.0 } else { 0.0 };
    }
    let excess = |t: f64| {
        let u = [t.cos(), t.sin()];
        let pair: Complex64 = d.direction.raw().iter().zip(u).map(|(c, x)| c * x).sum();
        u[0] * d.center[0] + u[1] * d.center[1] + 2.0 * d.rho * pair.norm() - support(body, &u).unwrap_or(f64::INFINITY)
    };
    let n = 3600;
    let step = TAU / n as f64;
    let best = (0..n).map(|k| k as f64 * step).max_by(|a, b| excess(*a).total_cmp(&excess(*b))).unwrap_or(0.0);
    let (mut lo, mut hi) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if excess(x1) < excess(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    excess(best).max(excess(0.5 * (lo + hi)))
}

/// `[lo, hi]` when the body is an axis-parallel box.
fn axis_box(body: &ConvexBody) -> Option<(Vec<f64>, Vec<f64>)> {
    let verts = body.polytope_vertices()?;
    let n = body.dim();
    let lo: Vec<f64> = (0..n).map(|k| verts.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..n).map(|k| verts.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let corner = |v: &Vec<f64>| (0..n).all(|k| (v[k] - lo[k]).abs() < 1e-12 || (v[k] - hi[k]).abs() < 1e-12);
    (verts.len() == 1 << n && verts.iter().all(corner)).then_some((lo, hi))
}

fn polygon_area(pts: &[Vec<f64>]) -> f64 {
    let k = pts.len();
    0.5 * (0..k)
        .map(|i| pts[i][0] * pts[(i + 1) % k][1] - pts[i][1] * pts[(i + 1) % k][0])
        .sum::<f64>()
        .abs()
}

/// Violation of the optimality conditions (primal and dual feasibility, gap).
fn kkt_gap(lp: &LinearProgram) -> Sampled {
    let sol = solve_lp(lp).map_err(|e| e.to_string())?;
    if sol.status != LpStatus::Optimal {
        return Err(format!("status {:?}", sol.status));
    }
    let primal = lp.max_violation(&sol.x);
    let dual_sign = sol.duals.iter().fold(0.0f64, |w, y| w.max(-y));
    let n = lp.objective.len();
    let dual_eq = (0..n)
        .map(|j| {
            let s: f64 = sol.duals.iter().zip(&lp.rows).map(|(y, r)| y * r[j]).sum();
            (s - lp.objective[j]).abs()
        })
        .fold(0.0, f64::max);
    let dual_value: f64 = sol.duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
    let gap = (dual_value - sol.value).abs() / (1.0 + sol.value.abs());
    Ok(primal.max(dual_sign).max(dual_eq).max(gap))
}

/// Bounded feasible LP: objective in the cone of the rows, slack at a random point.
fn random_lp(rng: &mut ChaCha8Rng, d: usize, m: usize) -> LinearProgram {
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rhs = rows
        .iter()
        .map(|r| r.iter().zip(&x0).map(|(a, b)| a * b).sum::<f64>() + rng.gen_range(0.0..1.0))
        .collect();
    let mut objective = vec![0.0; d];
    for r in &rows {
        let y: f64 = rng.gen_range(0.0..1.0);
        objective.iter_mut().zip(r).for_each(|(c, a)| *c += y * a);
    }
    LinearProgram { objective, rows, rhs }
}

pub fn run(loaded: &Loaded, suite: Suite, seed: u64, opts: &VkOptions) -> Result<Report> {
    let mut s = Suites {
        loaded,
        seed,
        opts: *opts,
        checks: Vec::new(),
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Lp {
        s.lp();
    }
    if all || suite == Suite::Extremal {
        s.extremal();
    }
    if all || suite == Suite::Robin {
        s.robin();
    }
    if all || suite == Suite::Vk {
        s.vk();
    }
    if all || suite == Suite::Foliation {
        s.foliation();
    }
    Ok(Report {
        seed,
        passed: s.checks.iter().all(|c| c.passed),
        checks: s.checks,
    })
}
