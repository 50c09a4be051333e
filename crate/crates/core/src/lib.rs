//! Numerical radius of complex matrices, its proximal map, and disk-matrix
//! certification.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: complex Hermitian eigensolver, SVD, PSD square root, null spaces.
//! - [`radius`]: support function of the field of values, the numerical radius by
//!   circle scanning, the divergence and separation measures.
//! - [`sdp`]: a small primal-dual interior-point solver for the radius and prox programs.
//! - [`certificate`]: disk certificates from the null space of the banded `Delta` matrix.
//! - [`ando`]: Ando factors `A = 2 S U C`, pencil tests and representor measures.
//! - [`experiment`]: random prox experiment, co-vanishing analysis, CSV/SVG reports.

pub mod ando;
pub mod certificate;
mod error;
pub mod experiment;
pub mod linalg;
pub mod radius;
pub mod sdp;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianMatrix, C64};

/// Worked matrices used throughout the tests, docs and CLI examples.
pub mod examples {
    use crate::linalg::{ComplexMatrix, HermitianMatrix};

    /// Strongly certified 2x2 disk matrix `[[0, 2], [0, 0]]`.
    pub fn shift_two() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0])
    }

    /// 3x3 disk matrix without a spanning certificate.
    pub fn non_spanning_disk() -> ComplexMatrix {
        ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 2.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.0])
    }

    /// Singular 3x3 matrix with a representor of eigenvalues +-1 that is not a disk matrix.
    pub fn rank_chain_counterexample() -> ComplexMatrix {
        ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// `diag(-1, s, 1)`, a representor family for [`non_spanning_disk`] when `|s| <= 3/5`.
    pub fn representor_family(s: f64) -> HermitianMatrix {
        HermitianMatrix::from_real_diag(&[-1.0, s, 1.0])
    }

    /// Nilpotent Jordan block of order `n` (ones on the superdiagonal).
    pub fn jordan_block(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                crate::linalg::ONE
            } else {
                crate::linalg::ZERO
            }
        })
    }
}
