//! Small dense kernels: dot products, power iteration and Cholesky solves.
//! Everything here works on tiny local matrices (a component's Gram matrix or
//! a desk-scale Hessian), so plain row-major `Vec<f64>` storage is enough.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Largest eigenvalue of a symmetric positive semidefinite `dim x dim`
/// matrix (row-major), by power iteration from the all-ones vector.
///
/// Stops after `max_iter` iterations or when the Rayleigh quotient changes by
/// less than `rel_tol` relative.
pub fn power_iteration_sym(mat: &[f64], dim: usize, max_iter: usize, rel_tol: f64) -> f64 {
    debug_assert_eq!(mat.len(), dim * dim);
    if dim == 0 {
        return 0.0;
    }
    if dim == 1 {
        return mat[0].max(0.0);
    }
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut mv = vec![0.0; dim];
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        matvec(mat, dim, &v, &mut mv);
        let next = dot(&v, &mv);
        let nrm = norm_sq(&mv).sqrt();
        if nrm == 0.0 {
            return 0.0;
        }
        for (vi, mi) in v.iter_mut().zip(&mv) {
            *vi = mi / nrm;
        }
        let done = (next - lambda).abs() <= rel_tol * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    // one more Rayleigh quotient with the final normalized iterate
    matvec(mat, dim, &v, &mut mv);
    dot(&v, &mv).max(lambda)
}

/// Largest eigenvalue of a symmetric `dim x dim` matrix. Small matrices use a
/// dense symmetric eigensolver so the result is accurate to rounding; larger
/// ones fall back to power iteration.
pub fn lambda_max_sym(mat: &[f64], dim: usize) -> f64 {
    debug_assert_eq!(mat.len(), dim * dim);
    match dim {
        0 => 0.0,
        1 => mat[0].max(0.0),
        d if d <= DENSE_EIGEN_LIMIT => nalgebra::DMatrix::from_row_slice(d, d, mat)
            .symmetric_eigenvalues()
            .max()
            .max(0.0),
        d => power_iteration_sym(mat, d, 10_000, 1e-14),
    }
}

const DENSE_EIGEN_LIMIT: usize = 400;

/// Squared spectral norm of a `rows x cols` row-major matrix, computed on the
/// smaller of the two Gram matrices.
pub fn spectral_norm_sq(mat: &[f64], rows: usize, cols: usize) -> f64 {
    let gram = if cols <= rows {
        // A^T A (cols x cols)
        let mut g = vec![0.0; cols * cols];
        for r in 0..rows {
            let row = &mat[r * cols..(r + 1) * cols];
            for a in 0..cols {
                for b in 0..cols {
                    g[a * cols + b] += row[a] * row[b];
                }
            }
        }
        (g, cols)
    } else {
        // A A^T (rows x rows)
        let mut g = vec![0.0; rows * rows];
        for a in 0..rows {
            for b in 0..rows {
                g[a * rows + b] = dot(&mat[a * cols..(a + 1) * cols], &mat[b * cols..(b + 1) * cols]);
            }
        }
        (g, rows)
    };
    lambda_max_sym(&gram.0, gram.1)
}

pub fn matvec(mat: &[f64], dim: usize, v: &[f64], out: &mut [f64]) {
    for (r, o) in out.iter_mut().enumerate().take(dim) {
        *o = dot(&mat[r * dim..(r + 1) * dim], v);
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(mat: &[f64], dim: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = mat[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(Error::input(format!(
                        "matrix is not positive definite (pivot {i} = {s:e})"
                    )));
                }
                l[i * dim + i] = s.sqrt();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    Ok(l)
}

/// Solve `L L^T x = b` in place.
pub fn cholesky_solve(l: &[f64], dim: usize, b: &mut [f64]) {
    for i in 0..dim {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * dim + k] * b[k];
        }
        b[i] = s / l[i * dim + i];
    }
    for i in (0..dim).rev() {
        let mut s = b[i];
        for k in i + 1..dim {
            s -= l[k * dim + i] * b[k];
        }
        b[i] = s / l[i * dim + i];
    }
}

/// Smallest eigenvalue of a symmetric positive definite matrix by inverse
/// power iteration on its Cholesky factor.
pub fn inverse_power_iteration_sym(
    mat: &[f64],
    dim: usize,
    max_iter: usize,
    rel_tol: f64,
) -> Result<f64> {
    let l = cholesky(mat, dim)?;
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    // a deterministic, mildly asymmetric start avoids starting orthogonal to
    // the bottom eigenvector on symmetric patterns
    for (i, vi) in v.iter_mut().enumerate() {
        *vi *= 1.0 + 0.01 * i as f64;
    }
    let n0 = norm_sq(&v).sqrt();
    v.iter_mut().for_each(|vi| *vi /= n0);
    let mut mv = vec![0.0; dim];
    let mut lambda = f64::INFINITY;
    for _ in 0..max_iter {
        let mut w = v.clone();
        cholesky_solve(&l, dim, &mut w);
        let nrm = norm_sq(&w).sqrt();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nrm;
        }
        matvec(mat, dim, &v, &mut mv);
        let next = dot(&v, &mv);
        let done = (next - lambda).abs() <= rel_tol * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_diag() {
        let m = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        assert!((power_iteration_sym(&m, 3, 200, 1e-14) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_max_close_eigenvalues() {
        // eigenvalues 1 +- 1e-6: power iteration from ones stalls here
        let e = 1e-6;
        let m = [1.0, e, e, 1.0];
        assert!((lambda_max_sym(&m, 2) - (1.0 + e)).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_rank_one() {
        // (3, 4) as a column: ||a||^2 = 25
        assert!((spectral_norm_sq(&[3.0, 4.0], 2, 1) - 25.0).abs() < 1e-12);
        assert!((spectral_norm_sq(&[3.0, 4.0], 1, 2) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_roundtrip() {
        let m = [4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&m, 2).unwrap();
        let mut b = [2.0, 1.0];
        cholesky_solve(&l, 2, &mut b);
        // 4x + 2y = 2, 2x + 3y = 1 -> x = 0.5, y = 0
        assert!((b[0] - 0.5).abs() < 1e-14 && b[1].abs() < 1e-14);
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_err());
    }

    #[test]
    fn inverse_power_pair_block() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let m = [2.0, 1.0, 1.0, 2.0];
        let lam = inverse_power_iteration_sym(&m, 2, 500, 1e-15).unwrap();
        assert!((lam - 1.0).abs() < 1e-10);
    }
}
