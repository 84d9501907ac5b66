//! Sparse complex linear solves for the steady-state problem.
//!
//! The primary path is a direct sparse LU (faer); the fallback is a
//! Jacobi-preconditioned BiCGSTAB. Residuals are always re-checked by the
//! caller against the original operator, independently of either solver.

use faer::complex_native::c64;
use faer::prelude::*;
use faer::sparse::SparseColMat;
use num_complex::Complex64;

use crate::sparse::SparseOperator;

/// Direct sparse LU solve of `A x = b`. Returns `None` when the
/// factorization reports a singular matrix.
pub fn sparse_lu_solve(a: &SparseOperator, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.dim();
    let triplets: Vec<(usize, usize, c64)> = a
        .iter()
        .map(|(r, c, v)| (r, c, c64::new(v.re, v.im)))
        .collect();
    let mat = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &triplets).ok()?;
    let lu = mat.sp_lu().ok()?;
    let mut rhs = faer::Mat::<c64>::zeros(n, 1);
    for (i, v) in b.iter().enumerate() {
        rhs[(i, 0)] = c64::new(v.re, v.im);
    }
    let x = lu.solve(&rhs);
    Some((0..n).map(|i| Complex64::new(x[(i, 0)].re, x[(i, 0)].im)).collect())
}

/// Outcome of an iterative solve: the best iterate and its relative
/// residual `‖b − Ax‖₂ / ‖b‖₂`.
pub struct IterativeSolve {
    pub x: Vec<Complex64>,
    pub rel_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Jacobi-preconditioned BiCGSTAB for `A x = b`.
pub fn bicgstab(
    a: &SparseOperator,
    b: &[Complex64],
    x0: Option<&[Complex64]>,
    rel_tol: f64,
    max_iter: usize,
) -> IterativeSolve {
    let n = a.dim();
    let inv_diag: Vec<Complex64> = (0..n)
        .map(|i| {
            let d = a.get(i, i);
            if d.norm() > 1e-300 {
                d.inv()
            } else {
                Complex64::ONE
            }
        })
        .collect();
    let precond = |v: &[Complex64], out: &mut Vec<Complex64>| {
        out.clear();
        out.extend(v.iter().zip(&inv_diag).map(|(vi, di)| vi * di));
    };

    let b_norm = norm2(b).max(1e-300);
    let mut x: Vec<Complex64> = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![Complex64::ZERO; n],
    };
    let mut ax = vec![Complex64::ZERO; n];
    a.matvec(&x, &mut ax);
    let mut r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut r_hat = r.clone();
    let mut rho = Complex64::ONE;
    let mut alpha = Complex64::ONE;
    let mut omega = Complex64::ONE;
    let mut v = vec![Complex64::ZERO; n];
    let mut p = vec![Complex64::ZERO; n];
    let mut p_hat = Vec::with_capacity(n);
    let mut s_hat = Vec::with_capacity(n);
    let mut t = vec![Complex64::ZERO; n];

    let mut best_x = x.clone();
    let mut best_res = norm2(&r) / b_norm;

    for it in 0..max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new.norm() < 1e-290 {
            // Breakdown: restart with the current residual.
            r_hat.copy_from_slice(&r);
            rho = Complex64::ONE;
            alpha = Complex64::ONE;
            omega = Complex64::ONE;
            v.fill(Complex64::ZERO);
            p.fill(Complex64::ZERO);
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut p_hat);
        a.matvec(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.norm() < 1e-290 {
            r_hat.copy_from_slice(&r);
            rho = Complex64::ONE;
            alpha = Complex64::ONE;
            omega = Complex64::ONE;
            v.fill(Complex64::ZERO);
            p.fill(Complex64::ZERO);
            continue;
        }
        alpha = rho_new / denom;
        let s: Vec<Complex64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        if norm2(&s) / b_norm < rel_tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return IterativeSolve {
                rel_residual: residual(a, &x, b) / b_norm,
                x,
                converged: true,
                iterations: it + 1,
            };
        }
        precond(&s, &mut s_hat);
        a.matvec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt.norm() > 1e-290 {
            dot(&t, &s) / tt
        } else {
            Complex64::ZERO
        };
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        let res = norm2(&r) / b_norm;
        if res < best_res {
            best_res = res;
            best_x.copy_from_slice(&x);
        }
        if res < rel_tol {
            return IterativeSolve {
                rel_residual: residual(a, &x, b) / b_norm,
                x,
                converged: true,
                iterations: it + 1,
            };
        }
        rho = rho_new;
    }
    IterativeSolve {
        x: best_x,
        rel_residual: best_res,
        converged: false,
        iterations: max_iter,
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(a: &SparseOperator, x: &[Complex64], b: &[Complex64]) -> f64 {
    let mut ax = vec![Complex64::ZERO; x.len()];
    a.matvec(x, &mut ax);
    ax.iter()
        .zip(b)
        .map(|(ai, bi)| (ai - bi).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
