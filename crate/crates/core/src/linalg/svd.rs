//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! One-sided Jacobi works on the columns of the matrix directly instead of on
//! `M^* M`, so small singular values keep absolute accuracy near `eps * |M|`.
//! The disk-defect measure depends on that.

use super::eig::normalize_phase;
use super::matrix::{dot, norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `M = U diag(sigma) V^*` with `k = min(rows, cols)` singular values, nonincreasing.
/// `U` is `rows x k`, `V` is `cols x k`; both have orthonormal columns.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for j in 0..self.sigma.len() {
            for i in 0..us.rows() {
                us[(i, j)] *= self.sigma[j];
            }
        }
        us.matmul(&self.v.adjoint())
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows() >= m.cols() {
        tall_svd(m, true)
    } else {
        let t = tall_svd(&m.adjoint(), true)?;
        Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let t = if m.rows() >= m.cols() {
        tall_svd(m, false)?
    } else {
        tall_svd(&m.adjoint(), false)?
    };
    Ok(t.sigma)
}

pub fn sigma_min(m: &ComplexMatrix) -> Result<f64> {
    Ok(*singular_values(m)?.last().unwrap_or(&0.0))
}

fn tall_svd(m: &ComplexMatrix, want_u: bool) -> Result<Svd> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut cols_u: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut cols_v: Vec<Vec<C64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    let tol = f64::EPSILON * rows as f64;
    // Columns below rounding level of the whole matrix carry no direction to rotate.
    let floor = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut converged = false;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        worst = 0.0f64;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = norm(&cols_u[p]).powi(2);
                let beta = norm(&cols_u[q]).powi(2);
                let gamma = dot(&cols_u[p], &cols_u[q]);
                let g = gamma.norm();
                if g == 0.0 || alpha <= floor || beta <= floor {
                    continue;
                }
                let rel = g / (alpha * beta).sqrt();
                worst = worst.max(rel);
                if rel <= tol {
                    continue;
                }
                // Diagonalize the 2x2 Gram block [[alpha, gamma], [conj(gamma), beta]].
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let v00 = C64::new(c, 0.0);
                let v01 = C64::new(s, 0.0);
                let v10 = phase * (-s);
                let v11 = phase * c;
                rotate(&mut cols_u, p, q, v00, v01, v10, v11);
                rotate(&mut cols_v, p, q, v00, v01, v10, v11);
            }
        }
        if worst <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "one-sided Jacobi SVD",
            iterations: MAX_SWEEPS,
            residual: worst,
        });
    }

    let mut sigma: Vec<f64> = cols_u.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    sigma = order.iter().map(|&i| sigma[i]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);

    let mut v = ComplexMatrix::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &cols_v[src]);
    }

    let mut u = ComplexMatrix::zeros(rows, cols);
    if want_u {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
        for (dst, &src) in order.iter().enumerate() {
            let s = sigma[dst];
            let mut col: Vec<C64>;
            if s > smax * f64::EPSILON * rows as f64 && s > 0.0 {
                col = cols_u[src].iter().map(|z| z / s).collect();
                // Re-orthonormalize against earlier columns to scrub rounding.
                for b in &basis {
                    let d = dot(b, &col);
                    for (x, y) in col.iter_mut().zip(b) {
                        *x -= d * y;
                    }
                }
                let nc = norm(&col);
                col.iter_mut().for_each(|x| *x /= nc);
            } else {
                col = complete_orthonormal(&basis, rows);
            }
            basis.push(col);
        }
        for (j, c) in basis.iter().enumerate() {
            u.set_column(j, c);
        }
    }
    Ok(Svd { u, sigma, v })
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, v00: C64, v01: C64, v10: C64, v11: C64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = a * v00 + b * v10;
        *y = a * v01 + b * v11;
    }
}

/// A unit vector orthogonal to every vector in `basis` (assumed orthonormal).
pub(crate) fn complete_orthonormal(basis: &[Vec<C64>], dim: usize) -> Vec<C64> {
    let mut best: Option<Vec<C64>> = None;
    let mut best_norm = 0.0;
    for k in 0..dim {
        let mut e = vec![ZERO; dim];
        e[k] = ONE;
        for _ in 0..2 {
            for b in basis {
                let d = dot(b, &e);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let ne = norm(&e);
        if ne > best_norm {
            best_norm = ne;
            best = Some(e);
        }
        if ne > 0.7 {
            break;
        }
    }
    let mut e = best.expect("dimension exceeds basis size");
    e.iter_mut().for_each(|x| *x /= best_norm);
    e
}

/// Right singular vectors of `m` whose singular values are at most
/// `rtol * sigma_max`, or every right singular vector when `m` is zero.
pub fn null_space(m: &ComplexMatrix, rtol: f64) -> Result<Vec<Vec<C64>>> {
    let cols = m.cols();
    // Pad short-and-wide inputs with zero rows so every right vector is computed.
    let padded;
    let target = if m.rows() < cols {
        let mut p = ComplexMatrix::zeros(cols, cols);
        p.set_block(0, 0, m);
        padded = p;
        &padded
    } else {
        m
    };
    let s = tall_svd(target, false)?;
    let cutoff = rtol * s.sigma_max();
    Ok((0..cols)
        .filter(|&j| s.sigma_max() == 0.0 || s.sigma[j] <= cutoff)
        .map(|j| {
            let mut v = s.v.column(j);
            normalize_phase(&mut v);
            v
        })
        .collect())
}
