//! Dense complex linear algebra sized for small matrices (order up to a few dozen).

pub mod chol;
mod eig;
mod matrix;
mod svd;

pub use eig::{herm_eig, herm_eigenvalues, lambda_max, psd_sqrt, EigenDecomposition};
pub use matrix::{ComplexMatrix, HermitianMatrix, C64, I, ONE, ZERO};
pub use svd::{null_space, sigma_min, singular_values, svd, Svd};

pub(crate) use eig::normalize_phase;
pub(crate) use svd::complete_orthonormal;

/// Nearest unitary matrix in Frobenius norm (polar factor).
pub fn nearest_unitary(m: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
    let s = svd(m)?;
    Ok(s.u.matmul(&s.v.adjoint()))
}

/// `|Q^* Q - I|_F`.
pub fn unitarity_residual(q: &ComplexMatrix) -> f64 {
    (&q.adjoint().matmul(q) - &ComplexMatrix::identity(q.cols())).frobenius_norm()
}
