//! Thin helpers over `nalgebra` for the tiny dense systems used here.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

pub(crate) fn matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Solves the square system `A x = b`; `None` when `A` is (numerically) singular.
pub(crate) fn solve(rows: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let a = matrix(rows);
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    let lu = a.lu();
    let det = lu.determinant();
    if det.abs() <= 1e-12 * scale.powi(rows.len() as i32) {
        return None;
    }
    lu.solve(&DVector::from_column_slice(b))
        .map(|x| x.iter().copied().collect())
}

pub(crate) fn inverse(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let a = matrix(rows);
    let n = a.nrows();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    if a.determinant().abs() <= 1e-12 * scale.powi(n as i32) {
        return None;
    }
    let inv = a.try_inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}

pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    matrix(rows).rank(tol)
}

/// Vector orthogonal to the `n - 1` given vectors of `R^n` (cofactor expansion).
pub(crate) fn orthogonal_complement(vectors: &[Vec<f64>]) -> Vec<f64> {
    let n = vectors.len() + 1;
    (0..n)
        .map(|k| {
            let minor = DMatrix::from_fn(n - 1, n - 1, |i, j| {
                let col = if j < k { j } else { j + 1 };
                vectors[i][col]
            });
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if n == 1 {
                sign
            } else {
                sign * minor.determinant()
            }
        })
        .collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|r| crate::lp::dot(r, x)).collect()
}

pub(crate) fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.first().map_or(0, Vec::len);
    (0..n).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// All `k`-element index subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(5, 1).len(), 5);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn complement_is_orthogonal() {
        let a = vec![1.0, 2.0, 0.5];
        let b = vec![-1.0, 0.0, 3.0];
        let n = orthogonal_complement(&[a.clone(), b.clone()]);
        assert!(crate::lp::dot(&n, &a).abs() < 1e-12);
        assert!(crate::lp::dot(&n, &b).abs() < 1e-12);
        assert!(norm(&n) > 1.0);
    }

    #[test]
    fn singular_solve_is_none() {
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0]).is_none());
        let x = solve(&[vec![2.0, 0.0], vec![0.0, 4.0]], &[1.0, 2.0]).unwrap();
        assert_eq!(x, vec![0.5, 0.5]);
    }
}
