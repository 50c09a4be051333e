//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use super::matrix::{ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const PSD_CLAMP_BAND: f64 = 1e-10;

/// Eigenvalues in nonincreasing order; column `k` of `eigenvectors` pairs with `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// `Q diag(f(lambda)) Q^*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let q = &self.eigenvectors;
        let n = q.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = q[(i, k)] * w;
                for j in 0..=i {
                    out[(i, j)] += qi * q[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::from_lower(&out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn herm_eig(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let (values, vectors) = jacobi(h, true)?;
    Ok(EigenDecomposition {
        eigenvalues: values,
        eigenvectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only, nonincreasing.
pub fn herm_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(h, false)?.0)
}

pub fn lambda_max(h: &HermitianMatrix) -> Result<f64> {
    Ok(herm_eigenvalues(h)?[0])
}

fn jacobi(h: &HermitianMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = h.order();
    let mut a = h.as_matrix().clone();
    let mut q = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = a.frobenius_norm();
    let threshold = OFF_DIAGONAL_TOL * scale;

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += 2.0 * a[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if off(&a) <= threshold {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                let abs = apr.norm();
                if abs == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let arr = a[(r, r)].re;
                // Tiny relative to both diagonal entries: zeroing is exact to rounding.
                if abs < f64::EPSILON * 1e-3 * (app.abs() + arr.abs()) {
                    a[(p, r)] = ZERO;
                    a[(r, p)] = ZERO;
                    continue;
                }
                let phase = (apr / abs).conj();
                let zeta = (arr - app) / (2.0 * abs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // V = diag(1, phase) * [[c, s], [-s, c]]
                let v00 = C64::new(c, 0.0);
                let v01 = C64::new(s, 0.0);
                let v10 = phase * (-s);
                let v11 = phase * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = akp * v00 + akr * v10;
                    a[(k, r)] = akp * v01 + akr * v11;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = v00.conj() * apk + v10.conj() * ark;
                    a[(r, k)] = v01.conj() * apk + v11.conj() * ark;
                }
                a[(p, r)] = ZERO;
                a[(r, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
                if let Some(q) = q.as_mut() {
                    for k in 0..n {
                        let qkp = q[(k, p)];
                        let qkr = q[(k, r)];
                        q[(k, p)] = qkp * v00 + qkr * v10;
                        q[(k, r)] = qkp * v01 + qkr * v11;
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Hermitian Jacobi eigensolver",
            iterations: sweeps,
            residual: off(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = q.map(|q| {
        let mut sorted = ComplexMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = q.column(src);
            normalize_phase(&mut col);
            sorted.set_column(dst, &col);
        }
        sorted
    });
    Ok((values, vectors))
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
pub(crate) fn normalize_phase(v: &mut [C64]) {
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = k;
        }
    }
    let m = v[best].norm();
    if m > 0.0 {
        let ph = (v[best] / m).conj();
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
///
/// Eigenvalues within `-1e-10 * max(1, |H|)` of zero are clamped; anything more
/// negative is reported as [`Error::NotPsd`].
pub fn psd_sqrt(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = herm_eig(h)?;
    let scale = eig.max().abs().max(eig.min().abs()).max(1.0);
    if eig.min() < -PSD_CLAMP_BAND * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    fn herm(n: usize, f: impl Fn(usize, usize) -> C64) -> HermitianMatrix {
        HermitianMatrix::from_lower(&ComplexMatrix::from_fn(n, n, f))
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let h = HermitianMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = herm_eig(&h).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn hermitian_part_of_two_by_two_shift() {
        let h = herm(2, |i, j| if i != j { C64::new(2.0, 0.0) } else { ZERO });
        let e = herm_eig(&h).unwrap();
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn complex_reconstruction_and_unitarity() {
        let h = herm(6, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let e = herm_eig(&h).unwrap();
        let res = (h.as_matrix() - e.reconstruct().as_matrix()).frobenius_norm();
        assert!(res <= 1e-12 * h.frobenius_norm().max(1.0), "residual {res}");
        let q = &e.eigenvectors;
        let qq = q.adjoint().matmul(q);
        assert!((&qq - &ComplexMatrix::identity(6)).frobenius_norm() <= 6e-12);
    }

    #[test]
    fn zero_matrix() {
        let e = herm_eig(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn sqrt_of_examples() {
        let r = psd_sqrt(&HermitianMatrix::identity(3)).unwrap();
        assert!(r.as_matrix().approx_eq(&ComplexMatrix::identity(3), 1e-15));
        let r = psd_sqrt(&HermitianMatrix::from_real_diag(&[4.0, 0.0])).unwrap();
        assert!(r
            .as_matrix()
            .approx_eq(&ComplexMatrix::from_real_diag(&[2.0, 0.0]), 1e-15));
        // (I - Z)/2 with Z = diag(-1, 1)
        let r = psd_sqrt(&HermitianMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert!(r
            .as_matrix()
            .approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-15));
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large() {
        let r = psd_sqrt(&HermitianMatrix::from_real_diag(&[1.0, -1e-12])).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
        match psd_sqrt(&HermitianMatrix::from_real_diag(&[1.0, -1e-3])) {
            Err(Error::NotPsd { min_eigenvalue }) => assert_eq!(min_eigenvalue, -1e-3),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn phase_normalized_vectors() {
        let h = herm(2, |i, j| if i == j { ONE } else { C64::new(0.0, 1.0) });
        let e = herm_eig(&h).unwrap();
        for k in 0..2 {
            let col = e.eigenvectors.column(k);
            let m = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let big = col.iter().find(|z| z.norm() >= m * (1.0 - 1e-12)).unwrap();
            assert!(big.im.abs() < 1e-15 && big.re > 0.0);
        }
    }
}
