//! Small dense linear programming kernel.
//!
//! Problems have the form `maximize <c, x>` subject to `A x <= b` with `x`
//! free. They are solved by a two-phase tableau simplex using Bland's rule,
//! which rules out cycling and makes every solve a deterministic function of
//! its input. The problems met in this crate have at most a handful of
//! variables and a few hundred rows, so no sparsity machinery is used.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

/// Tightness tolerance used to report the active set.
pub const ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `maximize <objective, x>` subject to `rows[i] . x <= rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point. Empty unless `status` is optimal.
    pub x: Vec<f64>,
    pub value: f64,
    /// Rows tight at `x` (within [`ACTIVE_TOL`] relative to `1 + |b_i|`).
    pub active_set: Vec<usize>,
    /// Nonnegative multipliers with `A^T y = c`, one per row.
    pub duals: Vec<f64>,
}

impl LpSolution {
    fn status_only(status: LpStatus) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            value: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            },
            active_set: Vec::new(),
            duals: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let lp = LinearProgram {
            objective,
            rows,
            rhs,
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, row: Vec<f64>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<()> {
        let d = self.objective.len();
        if d == 0 {
            return Err(invalid("linear program needs at least one variable"));
        }
        if self.rows.is_empty() {
            return Err(invalid("linear program needs at least one constraint"));
        }
        if self.rows.len() != self.rhs.len() {
            return Err(invalid("constraint matrix and right-hand side differ in length"));
        }
        if self.rows.iter().any(|r| r.len() != d) {
            return Err(invalid("constraint row length does not match objective"));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite())
            && self.rows.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(invalid("linear program has non-finite entries"));
        }
        Ok(())
    }

    /// Largest violation `max_i (A_i x - b_i)`, clamped below at zero.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| dot(r, x) - b)
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense simplex tableau. Row `rows` is the objective row holding reduced
/// costs `z_j - c_j`; the last column is the right-hand side.
struct Tableau {
    rows: usize,
    cols: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.cols + 1;
        let p = self.t[r * w + s];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + s] = 1.0;
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + s];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
            self.t[i * w + s] = 0.0;
        }
        self.basis[r] = s;
    }

    /// Runs Bland's rule on the current objective row. Columns at or beyond
    /// `usable` never enter. Returns `false` when the problem is unbounded.
    fn run(&mut self, usable: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..usable).find(|&j| self.at(self.rows, j) < -COST_EPS);
            let Some(s) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, s);
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, s),
            }
        }
        Err(Error::Convergence {
            what: "simplex",
            residual: f64::NAN,
            last_iterate: Vec::new(),
        })
    }

    #[cfg(debug_assertions)]
    fn dump(&self, label: &str) {
        if log::log_enabled!(log::Level::Trace) {
            log::trace!("tableau {label}: basis {:?}", self.basis);
            for i in 0..=self.rows {
                let row = &self.t[i * (self.cols + 1)..(i + 1) * (self.cols + 1)];
                log::trace!("  {:?}", row);
            }
        }
    }

    #[cfg(not(debug_assertions))]
    fn dump(&self, _label: &str) {}
}

/// Solves `maximize <c, x>` subject to `A x <= b`, `x` free.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let d = lp.dim();
    let m = lp.num_rows();

    // Columns: x+ (d), x- (d), slacks (m), artificials (one per negative rhs).
    let flipped: Vec<bool> = lp.rhs.iter().map(|&b| b < 0.0).collect();
    let n_art = flipped.iter().filter(|&&f| f).count();
    let n_real = 2 * d + m;
    let cols = n_real + n_art;
    let w = cols + 1;
    let mut tab = Tableau {
        rows: m,
        cols,
        t: vec![0.0; (m + 1) * w],
        basis: vec![0; m],
    };
    let mut art = 0;
    for i in 0..m {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        for j in 0..d {
            tab.t[i * w + j] = sign * lp.rows[i][j];
            tab.t[i * w + d + j] = -sign * lp.rows[i][j];
        }
        tab.t[i * w + 2 * d + i] = sign;
        tab.t[i * w + cols] = sign * lp.rhs[i];
        if flipped[i] {
            let a = n_real + art;
            tab.t[i * w + a] = 1.0;
            tab.basis[i] = a;
            art += 1;
        } else {
            tab.basis[i] = 2 * d + i;
        }
    }

    let b_scale = 1.0 + lp.rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
    if n_art > 0 {
        // Phase 1: maximize -sum(artificials).
        for j in n_real..cols {
            tab.t[m * w + j] = 1.0;
        }
        for i in 0..m {
            if tab.basis[i] >= n_real {
                for j in 0..w {
                    tab.t[m * w + j] -= tab.t[i * w + j];
                }
            }
        }
        tab.run(cols)?;
        tab.dump("phase 1");
        if tab.rhs(m) < -1e-9 * b_scale {
            return Ok(LpSolution::status_only(LpStatus::Infeasible));
        }
        for i in 0..m {
            if tab.basis[i] >= n_real {
                if let Some(j) = (0..n_real).find(|&j| tab.at(i, j).abs() > 1e-9) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // Phase 2.
    for j in 0..w {
        tab.t[m * w + j] = 0.0;
    }
    for j in 0..d {
        tab.t[m * w + j] = -lp.objective[j];
        tab.t[m * w + d + j] = lp.objective[j];
    }
    for i in 0..m {
        let b = tab.basis[i];
        let f = tab.t[m * w + b];
        if f != 0.0 {
            for j in 0..w {
                tab.t[m * w + j] -= f * tab.t[i * w + j];
            }
        }
    }
    if !tab.run(n_real)? {
        return Ok(LpSolution::status_only(LpStatus::Unbounded));
    }
    tab.dump("phase 2");

    let mut x = vec![0.0; d];
    for i in 0..m {
        let b = tab.basis[i];
        if b < d {
            x[b] += tab.rhs(i);
        } else if b < 2 * d {
            x[b - d] -= tab.rhs(i);
        }
    }
    let duals: Vec<f64> = (0..m).map(|i| tab.at(m, 2 * d + i).max(0.0)).collect();
    let value = dot(&lp.objective, &x);
    let active_set = (0..m)
        .filter(|&i| lp.rhs[i] - dot(&lp.rows[i], &x) <= ACTIVE_TOL * (1.0 + lp.rhs[i].abs()))
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        active_set,
        duals,
    })
}

/// Extent of a linear functional over the optimal face of an LP.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceExtent {
    pub min: f64,
    pub max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
}

/// Relative pin applied to the objective when describing the optimal face.
pub fn face_tolerance(value: f64) -> f64 {
    1e-8 * (1.0 + value.abs())
}

/// Returns an LP whose feasible set is the optimal face of `lp`.
///
/// Rows carrying a positive multiplier in `sol` are pinned to equality
/// (complementary slackness characterizes the optimal face exactly for any
/// optimal dual), and the objective is pinned to within [`face_tolerance`]
/// of the optimum.
pub fn optimal_face_program(lp: &LinearProgram, sol: &LpSolution) -> Result<LinearProgram> {
    if !sol.is_optimal() {
        return Err(Error::LpStatus(sol.status));
    }
    let mut face = lp.clone();
    let y_max = sol.duals.iter().fold(0.0f64, |a, &y| a.max(y));
    let threshold = 1e-9 * y_max.max(1.0);
    for (i, &y) in sol.duals.iter().enumerate() {
        if y > threshold {
            let row: Vec<f64> = lp.rows[i].iter().map(|v| -v).collect();
            let slack = 1e-12 * (1.0 + lp.rhs[i].abs());
            face.push_row(row, -lp.rhs[i] + slack);
        }
    }
    let neg_obj: Vec<f64> = lp.objective.iter().map(|v| -v).collect();
    face.push_row(neg_obj, -(sol.value - face_tolerance(sol.value)));
    Ok(face)
}

/// Minimum and maximum of `<secondary, x>` over the optimal face, with the
/// points attaining them.
pub fn optimal_face_points(
    lp: &LinearProgram,
    sol: &LpSolution,
    secondary: &[f64],
) -> Result<FaceExtent> {
    if secondary.len() != lp.dim() {
        return Err(invalid("secondary objective has the wrong dimension"));
    }
    let mut face = optimal_face_program(lp, sol)?;
    face.objective = secondary.to_vec();
    let hi = solve_lp(&face)?;
    face.objective = secondary.iter().map(|v| -v).collect();
    let lo = solve_lp(&face)?;
    match (hi.status, lo.status) {
        (LpStatus::Optimal, LpStatus::Optimal) => Ok(FaceExtent {
            min: -lo.value,
            max: hi.value,
            argmin: lo.x,
            argmax: hi.x,
        }),
        (LpStatus::Optimal, s) | (s, _) => Err(Error::LpStatus(s)),
    }
}

/// `(min, max)` of `<secondary, x>` over the optimal face of `lp`.
pub fn optimal_face_extent(lp: &LinearProgram, secondary: &[f64]) -> Result<(f64, f64)> {
    let sol = solve_lp(lp)?;
    let ext = optimal_face_points(lp, &sol, secondary)?;
    Ok((ext.min, ext.max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square_lp(obj: Vec<f64>) -> LinearProgram {
        LinearProgram::new(
            obj,
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            vec![1.0; 4],
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_bounded() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.active_set, vec![0]);
    }

    #[test]
    fn square_corner() {
        let s = solve_lp(&square_lp(vec![1.0, 1.0])).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert_eq!(s.active_set, vec![0, 2]);
        assert!((s.duals[0] - 1.0).abs() < 1e-12 && (s.duals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![-1.0]], vec![0.0]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_pair() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![1.0], vec![-1.0]], vec![-1.0, -1.0]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // x >= 2, x <= 3
        let lp = LinearProgram::new(vec![-1.0], vec![vec![-1.0], vec![1.0]], vec![-2.0, 3.0]).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(LinearProgram::new(vec![1.0, 0.0], vec![vec![1.0]], vec![1.0]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![vec![1.0]], vec![1.0, 2.0]).is_err());
        let bad = LinearProgram {
            objective: vec![1.0],
            rows: vec![vec![1.0, 2.0]],
            rhs: vec![1.0],
        };
        assert!(matches!(solve_lp(&bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn face_of_unique_corner_is_a_point() {
        let (lo, hi) = optimal_face_extent(&square_lp(vec![1.0, 1.0]), &[1.0, 0.0]).unwrap();
        assert!((lo - 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn face_of_edge() {
        // maximize x over the square: optimal face is the right edge.
        let (lo, hi) = optimal_face_extent(&square_lp(vec![1.0, 0.0]), &[0.0, 1.0]).unwrap();
        assert!((lo + 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn face_of_unbounded_lp_is_an_error() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![-1.0]], vec![0.0]).unwrap();
        assert_eq!(
            optimal_face_extent(&lp, &[1.0]),
            Err(Error::LpStatus(LpStatus::Unbounded))
        );
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints through the optimal vertex (1, 1).
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..12 {
            let t = k as f64 / 11.0;
            rows.push(vec![t, 1.0 - t]);
            rhs.push(1.0);
        }
        rows.push(vec![-1.0, 0.0]);
        rhs.push(0.0);
        rows.push(vec![0.0, -1.0]);
        rhs.push(0.0);
        let lp = LinearProgram::new(vec![1.0, 1.0], rows, rhs).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 2.0).abs() < 1e-10);
    }
}
