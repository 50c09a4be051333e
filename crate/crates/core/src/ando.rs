//! Ando factorizations `A = 2 S U C` built from SDP-representors, the pencil
//! singularity test, and the property measures m1..m5.
//!
//! For unit-radius `A` and a representor `Z`, the factors are
//! `S = ((I - Z) / 2)^{1/2}`, `C = ((I + Z) / 2)^{1/2}` and a unitary `U`. `S` and `C`
//! share the eigenbasis of `Z`, so in that basis `2 S U C = A` fixes the entries of
//! `U` on rows where `S` is nonzero and columns where `C` is nonzero; the rest of
//! `U` is a unitary completion of that block.

use std::f64::consts::TAU;

use crate::certificate::disk_defect;
use crate::error::{Error, Result};
use crate::linalg::{
    complete_orthonormal, herm_eig, herm_eigenvalues, nearest_unitary, sigma_min,
    singular_values, svd, unitarity_residual, ComplexMatrix, HermitianMatrix, C64, ZERO,
};
use crate::sdp::build_phi;

/// Eigenvalues of `Z / r` may overshoot `[-1, 1]` by this much before rejection.
const SPECTRUM_SLACK: f64 = 1e-6;
/// Eigenvalues of `Z / r` this close to `+-1` are taken as exactly `+-1`, so that a
/// representor from an interior-point solve yields the exact kernels of `S` and `C`.
const SNAP_TOL: f64 = 1e-6;
const RECONSTRUCTION_TOL: f64 = 1e-6;
const UNITARITY_TOL: f64 = 1e-8;
/// Largest `|V^* V - I|_F` of the completion before polar projection.
const COMPLETION_TOL: f64 = 1e-6;
const FACTOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct AndoFactors {
    pub s: HermitianMatrix,
    pub u: ComplexMatrix,
    pub c: HermitianMatrix,
    /// `|A / r - 2 S U C|_F`.
    pub reconstruction_residual: f64,
    /// `|U^* U - I|_F`.
    pub unitarity_residual: f64,
}

impl AndoFactors {
    /// `2 S U C`.
    pub fn product(&self) -> ComplexMatrix {
        self.s
            .as_matrix()
            .matmul(&self.u)
            .matmul(self.c.as_matrix())
            .scale(2.0)
    }

    /// `|S^2 + C^2 - I|_F`.
    pub fn pythagorean_residual(&self) -> f64 {
        let s = self.s.as_matrix();
        let c = self.c.as_matrix();
        let n = s.rows();
        (&(&s.matmul(s) + &c.matmul(c)) - &ComplexMatrix::identity(n)).frobenius_norm()
    }
}

fn check_square(a: &ComplexMatrix, z: &HermitianMatrix) -> Result<usize> {
    if !a.is_square() || z.order() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{} but Z has order {}",
            a.rows(),
            a.cols(),
            z.order()
        )));
    }
    Ok(a.rows())
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Degenerate(format!("radius must be positive, got {r}")))
    }
}

/// Factors `A / r = 2 S U C` from a representor `Z` of `A` with `r = r(A)`.
pub fn ando_from_representor(a: &ComplexMatrix, z: &HermitianMatrix, r: f64) -> Result<AndoFactors> {
    let n = check_square(a, z)?;
    check_radius(r)?;
    let a_hat = a.scale(1.0 / r);
    let eig = herm_eig(&z.scale(1.0 / r))?;
    if eig.max() > 1.0 + SPECTRUM_SLACK || eig.min() < -1.0 - SPECTRUM_SLACK {
        return Err(Error::NotPsd {
            min_eigenvalue: 1.0 - eig.max().max(-eig.min()),
        });
    }
    let q = &eig.eigenvectors;
    let zs: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&z| {
            if z >= 1.0 - SNAP_TOL {
                1.0
            } else if z <= -1.0 + SNAP_TOL {
                -1.0
            } else {
                z
            }
        })
        .collect();
    let sv: Vec<f64> = zs.iter().map(|z| ((1.0 - z) / 2.0).sqrt()).collect();
    let cv: Vec<f64> = zs.iter().map(|z| ((1.0 + z) / 2.0).sqrt()).collect();

    // In the eigenbasis, B = Q^* A Q / 2 = diag(s) V diag(c) with V = Q^* U Q.
    let b = q.adjoint().matmul(&a_hat).matmul(q).scale(0.5);
    let rows: Vec<usize> = (0..n).filter(|&i| sv[i] > 0.0).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| cv[j] > 0.0).collect();
    let free_rows: Vec<usize> = (0..n).filter(|&i| sv[i] == 0.0).collect();
    let k = ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        b[(rows[i], cols[j])] / (sv[rows[i]] * cv[cols[j]])
    });

    let v = complete_unitary(&k, &rows, &cols, &free_rows, n)?;
    let s = HermitianMatrix::from_lower(&diag_in_basis(q, &sv));
    let c = HermitianMatrix::from_lower(&diag_in_basis(q, &cv));
    let mut out = AndoFactors {
        s,
        u: q.matmul(&v).matmul(&q.adjoint()),
        c,
        reconstruction_residual: 0.0,
        unitarity_residual: 0.0,
    };
    // Every representor admits a contraction here, but only some admit a unitary.
    let raw_unitarity = unitarity_residual(&out.u);
    if raw_unitarity > COMPLETION_TOL {
        return Err(Error::Factorization {
            reconstruction: (&a_hat - &out.product()).frobenius_norm(),
            unitarity: raw_unitarity,
        });
    }
    out.u = nearest_unitary(&out.u)?;
    out.reconstruction_residual = (&a_hat - &out.product()).frobenius_norm();
    out.unitarity_residual = unitarity_residual(&out.u);
    if out.reconstruction_residual > RECONSTRUCTION_TOL * a_hat.frobenius_norm().max(1.0)
        || out.unitarity_residual > UNITARITY_TOL
    {
        return Err(Error::Factorization {
            reconstruction: out.reconstruction_residual,
            unitarity: out.unitarity_residual,
        });
    }
    Ok(out)
}

fn diag_in_basis(q: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let qd = ComplexMatrix::from_fn(q.rows(), q.cols(), |i, j| q[(i, j)] * d[j]);
    qd.matmul(&q.adjoint())
}

/// A unitary `V` whose `(rows, cols)` block is `K`.
///
/// With `K = W diag(sigma) X^*`, the columns indexed by `cols` are
/// `[W sigma; F tau] X^*` where `tau = sqrt(1 - sigma^2)` and `F` places each
/// nonzero `tau` on its own free row; the remaining columns complete the basis.
fn complete_unitary(
    k: &ComplexMatrix,
    rows: &[usize],
    cols: &[usize],
    free_rows: &[usize],
    n: usize,
) -> Result<ComplexMatrix> {
    let (p, m) = (rows.len(), cols.len());
    let mut v = ComplexMatrix::zeros(n, n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    if m > 0 {
        // Right singular basis of K, padded to all m columns.
        let (w, sigma, x) = if p > 0 {
            let dec = svd(k)?;
            let mut xcols: Vec<Vec<C64>> = (0..dec.sigma.len()).map(|j| dec.v.column(j)).collect();
            while xcols.len() < m {
                let e = complete_orthonormal(&xcols, m);
                xcols.push(e);
            }
            (dec.u, dec.sigma, ComplexMatrix::from_columns(m, &xcols))
        } else {
            (ComplexMatrix::zeros(0, 0), Vec::new(), ComplexMatrix::identity(m))
        };
        // Columns of V restricted to `cols`, expressed in the right singular basis.
        // Free rows go to the largest `tau` first; any left over are at rounding
        // level when a completion exists, and the residual check below catches the rest.
        let mut rotated = ComplexMatrix::zeros(n, m);
        let mut taus: Vec<(usize, f64)> = Vec::with_capacity(m);
        for j in 0..m {
            let s = sigma.get(j).copied().unwrap_or(0.0);
            // tau = sqrt(1 - sigma^2) would turn an O(delta) error into O(sqrt(delta)).
            let s = if s >= 1.0 - SNAP_TOL { 1.0 } else { s };
            if j < sigma.len() {
                for (i, &ri) in rows.iter().enumerate() {
                    rotated[(ri, j)] = w[(i, j)] * s;
                }
            }
            taus.push((j, (1.0 - s * s).max(0.0).sqrt()));
        }
        taus.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (&(j, tau), &fi) in taus.iter().zip(free_rows) {
            rotated[(fi, j)] = C64::new(tau, 0.0);
        }
        let block = rotated.matmul(&x.adjoint());
        for (j, &cj) in cols.iter().enumerate() {
            let col = block.column(j);
            v.set_column(cj, &col);
            basis.push(col);
        }
    }
    for j in (0..n).filter(|j| !cols.contains(j)) {
        let e = complete_orthonormal(&basis, n);
        v.set_column(j, &e);
        basis.push(e);
    }
    Ok(v)
}

/// `I - 2 S^2`, a representor with top multiplicity at least `n` for any Ando
/// factorization of a unit-radius matrix.
pub fn canonical_representor(s: &HermitianMatrix) -> Result<HermitianMatrix> {
    let ev = herm_eigenvalues(s)?;
    let (hi, lo) = (ev[0], *ev.last().expect("nonempty"));
    if lo < -FACTOR_TOL || hi > 1.0 + FACTOR_TOL {
        return Err(Error::InvalidFactor(format!(
            "S must satisfy 0 <= S <= I, spectrum spans [{lo:e}, {hi:e}]"
        )));
    }
    let s2 = HermitianMatrix::from_lower(&s.as_matrix().matmul(s.as_matrix()));
    Ok(s2.shift_scale(1.0, -2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilTest {
    /// Largest `sigma_min(U C - w S)` over `w` in `{0} U {2 e^{2 pi i k / (n + 1)}}`.
    pub max_sigma_min: f64,
    /// `sigma_min(S)`, the limit as `w -> infinity`.
    pub sigma_min_s: f64,
}

impl PencilTest {
    pub fn is_singular(&self, tol: f64) -> bool {
        self.max_sigma_min <= tol
    }
}

/// `det(U C - w S)` has degree at most `n`, so vanishing at the `n + 2` test points
/// means the pencil is singular everywhere.
pub fn pencil_singularity(u: &ComplexMatrix, c: &HermitianMatrix, s: &HermitianMatrix) -> Result<PencilTest> {
    let n = u.rows();
    let uc = u.matmul(c.as_matrix());
    let points = std::iter::once(ZERO)
        .chain((0..=n).map(|k| C64::from_polar(2.0, TAU * k as f64 / (n + 1) as f64)));
    let mut worst = 0.0f64;
    for w in points {
        let m = &uc - &s.as_matrix().scale_c(w);
        worst = worst.max(sigma_min(&m)?);
    }
    Ok(PencilTest {
        max_sigma_min: worst,
        sigma_min_s: sigma_min(s.as_matrix())?,
    })
}

/// Eigenvalues of `Phi_A(Z)` within `cluster_tol * max(1, r)` of `r`.
pub fn multiplicity(a: &ComplexMatrix, z: &HermitianMatrix, r: f64, cluster_tol: f64) -> Result<usize> {
    let ev = herm_eigenvalues(&build_phi(a, z)?)?;
    let band = cluster_tol * r.max(1.0);
    Ok(ev.iter().filter(|&&l| r - l <= band).count())
}

/// Measures that vanish exactly when the corresponding property holds, evaluated
/// on `A / r` and `Z / r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyMeasures {
    /// `sigma_min(A)`: singularity.
    pub m1: f64,
    /// `sigma_{n-1}(A^2)`: `rank(A^2) < n - 1`.
    pub m2: f64,
    /// `max(1 - lambda_max(Z), lambda_min(Z) + 1)`: `Z` reaches both `1` and `-1`.
    pub m3: f64,
    /// `sigma_min(Delta(A))`: disk matrix.
    pub m4: f64,
    /// `1 - lambda_{n+1}(Phi_A(Z))`: top multiplicity above `n`.
    pub m5: f64,
}

impl PropertyMeasures {
    pub fn as_array(&self) -> [f64; 5] {
        [self.m1, self.m2, self.m3, self.m4, self.m5]
    }
}

pub fn property_measures(a: &ComplexMatrix, z: &HermitianMatrix, r: f64) -> Result<PropertyMeasures> {
    let n = check_square(a, z)?;
    check_radius(r)?;
    let a_hat = a.scale(1.0 / r);
    let z_hat = z.scale(1.0 / r);
    let sa = singular_values(&a_hat)?;
    let m1 = sa[n - 1];
    let m2 = if n >= 2 {
        singular_values(&a_hat.matmul(&a_hat))?[n - 2]
    } else {
        0.0
    };
    let zev = herm_eigenvalues(&z_hat)?;
    let m3 = (1.0 - zev[0]).max(zev[n - 1] + 1.0);
    let m4 = disk_defect(a, r)?;
    let phi = herm_eigenvalues(&build_phi(&a_hat, &z_hat)?)?;
    let m5 = 1.0 - phi[n];
    Ok(PropertyMeasures { m1, m2, m3, m4, m5 })
}
