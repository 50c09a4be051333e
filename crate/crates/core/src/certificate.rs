//! Disk-matrix detection through polynomial disk certificates.
//!
//! A disk certificate for a matrix `A` of unit radius is a nonzero polynomial vector
//! `p(w) = sum_{j=1..n} p^j w^{j-1}` with `(conj(w) A + w A^*) p(w) = 2 p(w)` on the
//! unit circle. Matching powers of `w` gives the recursion
//! `A p^{k+1} + A^* p^{k-1} = 2 p^k` (`k = 0..n+1`, with `p^{-1} = p^0 = p^{n+1} =
//! p^{n+2} = 0`), i.e. the stacked coefficients lie in the null space of the banded
//! block matrix built by [`build_delta`].

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, svd, ComplexMatrix, Svd, C64};
use crate::radius::{separation, ScanConfig};

/// Angles at which a certificate's defining identity is checked.
pub const RESIDUAL_ANGLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Absolute bound on `sigma_min(Delta(A / r))`.
    pub disk: f64,
    pub separation: f64,
    pub spanning: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            disk: 1e-7,
            separation: 1e-6,
            spanning: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiskCertificate {
    /// Column `j` holds the coefficient vector of `w^j`.
    pub coeffs: ComplexMatrix,
    /// Largest residual of the certificate identity over [`RESIDUAL_ANGLES`] angles.
    pub residual: f64,
    pub spanning_cond: f64,
    /// Frobenius norm of `coeffs` (1 after normalization).
    pub norm: f64,
    /// Dimension of the numerical null space the certificate was drawn from.
    pub null_dim: usize,
}

impl DiskCertificate {
    /// Evaluates `p(w)`.
    pub fn eval(&self, w: C64) -> Vec<C64> {
        let n = self.coeffs.rows();
        let mut out = vec![C64::new(0.0, 0.0); n];
        let mut pw = C64::new(1.0, 0.0);
        for j in 0..self.coeffs.cols() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.coeffs[(i, j)] * pw;
            }
            pw *= w;
        }
        out
    }

    pub fn is_unique(&self) -> bool {
        self.null_dim == 1
    }
}

/// The `n(n+2) x n^2` block-banded matrix: block `(k, j)` is `A` when `j = k + 1`,
/// `-2I` when `j = k`, and `A^*` when `j = k - 1` (block columns `j = 1..n`, block
/// rows `k = 0..n+1`).
pub fn build_delta(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "Delta needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let ah = a.adjoint();
    let minus_two = ComplexMatrix::identity(n).scale(-2.0);
    let mut d = ComplexMatrix::zeros(n * (n + 2), n * n);
    for j in 1..=n {
        let col = (j - 1) * n;
        d.set_block((j - 1) * n, col, a);
        d.set_block(j * n, col, &minus_two);
        d.set_block((j + 1) * n, col, &ah);
    }
    Ok(d)
}

fn normalized(a: &ComplexMatrix, r: f64) -> Result<ComplexMatrix> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Degenerate(format!(
            "disk tests need a positive radius, got {r}"
        )));
    }
    Ok(a.scale(1.0 / r))
}

/// `sigma_min(Delta(A / r))`, zero exactly for disk matrices when `r = r(A)`.
pub fn disk_defect(a: &ComplexMatrix, r: f64) -> Result<f64> {
    let d = build_delta(&normalized(a, r)?)?;
    Ok(*singular_values(&d)?.last().expect("nonempty"))
}

/// Certificate from the smallest right singular vector of `Delta`, if the
/// corresponding singular value is at most `cutoff`.
fn certificate_from(a_hat: &ComplexMatrix, dec: &Svd, cutoff: f64) -> Result<Option<DiskCertificate>> {
    let n = a_hat.rows();
    let smin = dec.sigma_min();
    if smin > cutoff {
        return Ok(None);
    }
    let null_dim = dec.sigma.iter().filter(|&&s| s <= cutoff).count();
    let k = dec.sigma.len() - 1;
    let mut v = dec.v.column(k);
    crate::linalg::normalize_phase(&mut v);
    let coeffs = ComplexMatrix::from_column_major(n, n, &v);
    let norm = coeffs.frobenius_norm();
    let coeffs = coeffs.scale(1.0 / norm);
    let spanning_cond = spanning_of(&coeffs)?;
    let mut cert = DiskCertificate {
        coeffs,
        residual: 0.0,
        spanning_cond,
        norm: 1.0,
        null_dim,
    };
    cert.residual = certificate_residual(a_hat, &cert);
    Ok(Some(cert))
}

/// Largest `|(conj(w) A + w A^*) p(w) - 2 p(w)|` over equispaced `w` on the circle.
pub fn certificate_residual(a_hat: &ComplexMatrix, cert: &DiskCertificate) -> f64 {
    let ah = a_hat.adjoint();
    (0..RESIDUAL_ANGLES)
        .map(|k| {
            let w = C64::from_polar(1.0, TAU * k as f64 / RESIDUAL_ANGLES as f64);
            let p = cert.eval(w);
            let lhs1 = a_hat.matvec(&p);
            let lhs2 = ah.matvec(&p);
            lhs1.iter()
                .zip(&lhs2)
                .zip(&p)
                .map(|((x, y), z)| (w.conj() * x + w * y - z * 2.0).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Extracts a unit-norm certificate when `sigma_min(Delta) <= rtol * sigma_max(Delta)`.
pub fn extract_certificate(a: &ComplexMatrix, r: f64, rtol: f64) -> Result<Option<DiskCertificate>> {
    let a_hat = normalized(a, r)?;
    let dec = svd(&build_delta(&a_hat)?)?;
    certificate_from(&a_hat, &dec, rtol * dec.sigma_max())
}

fn spanning_of(coeffs: &ComplexMatrix) -> Result<f64> {
    let s = singular_values(coeffs)?;
    let smax = s[0];
    if smax == 0.0 {
        return Err(Error::InvalidCertificate(
            "certificate coefficients are all zero".into(),
        ));
    }
    Ok(s.last().copied().unwrap_or(0.0) / smax)
}

/// `sigma_min / sigma_max` of the coefficient matrix; positive iff the certificate spans.
pub fn spanning_measure(cert: &DiskCertificate) -> Result<f64> {
    spanning_of(&cert.coeffs)
}

/// Same as [`spanning_measure`] for a raw coefficient matrix.
pub fn spanning_measure_of(coeffs: &ComplexMatrix) -> Result<f64> {
    spanning_of(coeffs)
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub strongly_certified: bool,
    pub disk_defect: f64,
    pub separation: f64,
    /// Spanning measure of the smallest right singular vector of `Delta`; a
    /// certificate's spanning measure when `disk_defect` is below threshold.
    pub spanning_cond: f64,
    pub certificate: Option<DiskCertificate>,
}

/// Disk with a spanning certificate and separated: all three sub-measures pass.
pub fn is_strongly_certified(a: &ComplexMatrix, r: f64, th: &Thresholds) -> Result<CertificationReport> {
    let a_hat = normalized(a, r)?;
    let dec = svd(&build_delta(&a_hat)?)?;
    let defect = dec.sigma_min();
    let candidate = certificate_from(&a_hat, &dec, f64::INFINITY)?.expect("cutoff admits all");
    let spanning_cond = candidate.spanning_cond;
    let certificate = (defect <= th.disk).then(|| DiskCertificate {
        null_dim: dec.sigma.iter().filter(|&&s| s <= th.disk).count(),
        ..candidate
    });
    let separation = separation(&a_hat, &ScanConfig::default())?;
    let strongly_certified =
        certificate.is_some() && separation >= th.separation && spanning_cond >= th.spanning;
    Ok(CertificationReport {
        strongly_certified,
        disk_defect: defect,
        separation,
        spanning_cond,
        certificate,
    })
}
