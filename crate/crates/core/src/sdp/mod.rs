//! Semidefinite programs for the numerical radius and its proximal map.
//!
//! Both programs bound the largest eigenvalue of the block matrix
//! `Phi_A(Z) = [[Z, A], [A^*, -Z]]` through the constraint `t I - Phi_A(Z) >= 0`:
//!
//! - radius: minimize `t` over `(t, Z)` with `A` fixed; the optimal `Z` is an
//!   SDP-representor of `A` and the optimal value is `r(A)`.
//! - prox: minimize `t + lambda |A - Y|_F^2` over `(t, Z, A)`; the optimal `A` is the
//!   proximal point of the radius at `Y`.

mod ipm;
mod verify;

use std::fmt;

use ipm::{IpmOptions, IpmOutcome, LmiProblem, SparseHerm};

use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, ComplexMatrix, HermitianMatrix, C64, I, ONE};

pub use verify::{verify_prox_optimality, ProxOptimalityReport};

/// Relative width of the top-eigenvalue cluster counted by [`RepresentorResult::top_multiplicity`].
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Duality gap (relative to `1 + |objective|`) and dual infeasibility target.
    pub tol: f64,
    pub max_iter: usize,
    /// When the target is missed because of numerical breakdown, the best iterate
    /// is still accepted if it meets this looser tolerance.
    pub accept_tol: Option<f64>,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 120,
            accept_tol: None,
        }
    }
}

impl SdpOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn accepts(&self, out: &IpmOutcome) -> bool {
        out.converged
            || self.accept_tol.is_some_and(|t| {
                out.gap <= t * (1.0 + out.objective.abs()) && out.dual_residual <= t
            })
    }
}

/// Convergence data of one interior-point solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpStats {
    pub objective: f64,
    pub duality_gap: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
}

/// An SDP-representor `Z` of `A` and the spectrum of `Phi_A(Z)`.
#[derive(Debug, Clone)]
pub struct RepresentorResult {
    pub z: HermitianMatrix,
    /// `lambda_max(Phi_A(Z))`.
    pub radius: f64,
    /// Spectrum of `Phi_A(Z)`, nonincreasing.
    pub phi_eigenvalues: Vec<f64>,
    pub top_multiplicity: usize,
    pub stats: SdpStats,
}

/// Output of the proximal program.
#[derive(Debug, Clone)]
pub struct ProxResult {
    pub a: ComplexMatrix,
    pub rep: RepresentorResult,
}

/// Solver failure carrying the best iterate found.
#[derive(Debug, Clone)]
pub struct SolverFailure {
    pub reason: String,
    pub stats: SdpStats,
    pub best_z: HermitianMatrix,
    pub best_a: Option<ComplexMatrix>,
}

impl fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SDP solver failed ({}) after {} iterations: objective {:.6e}, gap {:.3e}, \
             dual residual {:.3e}",
            self.reason,
            self.stats.iterations,
            self.stats.objective,
            self.stats.duality_gap,
            self.stats.kkt_residual
        )
    }
}

impl std::error::Error for SolverFailure {}

/// `[[Z, A], [A^*, -Z]]`.
pub fn build_phi(a: &ComplexMatrix, z: &HermitianMatrix) -> Result<HermitianMatrix> {
    let n = a.rows();
    if !a.is_square() || z.order() != n {
        return Err(Error::DimensionMismatch(format!(
            "Phi needs square A and Z of equal order, got A {}x{} and Z of order {}",
            a.rows(),
            a.cols(),
            z.order()
        )));
    }
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    m.set_block(0, 0, z.as_matrix());
    m.set_block(0, n, a);
    m.set_block(n, 0, &a.adjoint());
    m.set_block(n, n, &z.as_matrix().scale(-1.0));
    Ok(HermitianMatrix::from_lower(&m))
}

/// Number of eigenvalues within `cluster_tol * max(1, |lambda_1|)` of the largest.
pub fn count_top(eigenvalues: &[f64], cluster_tol: f64) -> usize {
    let top = eigenvalues[0];
    let band = cluster_tol * top.abs().max(1.0);
    eigenvalues.iter().filter(|&&l| top - l <= band).count()
}

/// Packs a representor `Z` and the spectrum of `Phi_A(Z)`.
pub fn representor(a: &ComplexMatrix, z: HermitianMatrix, stats: SdpStats) -> Result<RepresentorResult> {
    let phi = build_phi(a, &z)?;
    let ev = herm_eigenvalues(&phi)?;
    Ok(RepresentorResult {
        radius: ev[0],
        top_multiplicity: count_top(&ev, DEFAULT_CLUSTER_TOL),
        phi_eigenvalues: ev,
        z,
        stats,
    })
}

/// Variable layout: `t`, then `n^2` real coordinates of `Z`, then optionally `2 n^2` of `A`.
struct Layout {
    n: usize,
    with_a: bool,
}

impl Layout {
    fn z_count(&self) -> usize {
        self.n * self.n
    }

    fn a_offset(&self) -> usize {
        1 + self.z_count()
    }

    fn len(&self) -> usize {
        self.a_offset() + if self.with_a { 2 * self.n * self.n } else { 0 }
    }

    /// Coefficient matrices of `S = t I - Phi_A(Z)` for each variable.
    fn coefficients(&self) -> Vec<SparseHerm> {
        let n = self.n;
        let mut g = Vec::with_capacity(self.len());
        let mut t = SparseHerm::default();
        for p in 0..2 * n {
            t.push(p, p, ONE);
        }
        g.push(t);
        // Z = sum z_k B_k enters S as -[[B_k, 0], [0, -B_k]].
        for k in 0..n {
            let mut s = SparseHerm::default();
            s.push(k, k, -ONE);
            s.push(n + k, n + k, ONE);
            g.push(s);
        }
        for k in 0..n {
            for l in (k + 1)..n {
                for unit in [ONE, I] {
                    let mut s = SparseHerm::default();
                    s.push(k, l, -unit);
                    s.push(l, k, -unit.conj());
                    s.push(n + k, n + l, unit);
                    s.push(n + l, n + k, unit.conj());
                    g.push(s);
                }
            }
        }
        if self.with_a {
            // A = sum a_kl E_kl enters S as -[[0, E_kl], [E_lk, 0]].
            for k in 0..n {
                for l in 0..n {
                    for unit in [ONE, I] {
                        let mut s = SparseHerm::default();
                        s.push(k, n + l, -unit);
                        s.push(n + l, k, -unit.conj());
                        g.push(s);
                    }
                }
            }
        }
        g
    }

    fn z_from(&self, x: &[f64]) -> HermitianMatrix {
        let n = self.n;
        let mut z = ComplexMatrix::zeros(n, n);
        let mut idx = 1;
        for k in 0..n {
            z[(k, k)] = C64::new(x[idx], 0.0);
            idx += 1;
        }
        for k in 0..n {
            for l in (k + 1)..n {
                let re = x[idx];
                let im = x[idx + 1];
                idx += 2;
                z[(k, l)] = C64::new(re, im);
                z[(l, k)] = C64::new(re, -im);
            }
        }
        HermitianMatrix::from_lower(&z)
    }

    fn a_from(&self, x: &[f64]) -> ComplexMatrix {
        let n = self.n;
        let off = self.a_offset();
        ComplexMatrix::from_fn(n, n, |k, l| {
            let idx = off + 2 * (k * n + l);
            C64::new(x[idx], x[idx + 1])
        })
    }

    fn push_a(&self, x: &mut [f64], a: &ComplexMatrix) {
        let n = self.n;
        let off = self.a_offset();
        for k in 0..n {
            for l in 0..n {
                let idx = off + 2 * (k * n + l);
                x[idx] = a[(k, l)].re;
                x[idx + 1] = a[(k, l)].im;
            }
        }
    }
}

fn stats_of(out: &IpmOutcome) -> SdpStats {
    SdpStats {
        objective: out.objective,
        duality_gap: out.gap,
        kkt_residual: out.dual_residual,
        iterations: out.iterations,
    }
}

fn check_square(a: &ComplexMatrix, what: &str) -> Result<usize> {
    if a.is_square() && a.rows() > 0 {
        Ok(a.rows())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

/// Minimizes `lambda_max(Phi_A(Z))` over Hermitian `Z`.
pub fn solve_radius_sdp(a: &ComplexMatrix, opts: &SdpOptions) -> Result<RepresentorResult> {
    let n = check_square(a, "A")?;
    let layout = Layout { n, with_a: false };
    let m = layout.len();
    let mut c = vec![0.0; m];
    c[0] = 1.0;
    let g0 = build_phi(a, &HermitianMatrix::zeros(n))?
        .as_matrix()
        .scale(-1.0);
    let prob = LmiProblem {
        dim: 2 * n,
        c,
        q: vec![0.0; m],
        g: layout.coefficients(),
        g0,
    };
    let mut x0 = vec![0.0; m];
    x0[0] = 2.0 * a.frobenius_norm() + 1.0;
    let big_x0 = HermitianMatrix::identity(2 * n).scale(0.5 / n as f64);
    let out = ipm::solve(
        &prob,
        x0,
        big_x0,
        &IpmOptions {
            tol: opts.tol,
            max_iter: opts.max_iter,
        },
    );
    let z = layout.z_from(&out.x);
    let stats = stats_of(&out);
    if !opts.accepts(&out) {
        return Err(Box::new(SolverFailure {
            reason: out.note.to_string(),
            stats,
            best_z: z,
            best_a: None,
        })
        .into());
    }
    representor(a, z, stats)
}

/// Jointly minimizes `lambda_max(Phi_A(Z)) + lambda |A - Y|_F^2` over `(A, Z)`.
pub fn solve_prox_sdp(y: &ComplexMatrix, lambda: f64, opts: &SdpOptions) -> Result<ProxResult> {
    let n = check_square(y, "Y")?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Degenerate(format!(
            "prox coefficient must be positive, got {lambda}"
        )));
    }
    let layout = Layout { n, with_a: true };
    let m = layout.len();
    let mut c = vec![0.0; m];
    let mut q = vec![0.0; m];
    c[0] = 1.0;
    let mut ycoords = vec![0.0; m];
    layout.push_a(&mut ycoords, y);
    for j in layout.a_offset()..m {
        c[j] = -2.0 * lambda * ycoords[j];
        q[j] = 2.0 * lambda;
    }
    let prob = LmiProblem {
        dim: 2 * n,
        c,
        q,
        g: layout.coefficients(),
        g0: ComplexMatrix::zeros(2 * n, 2 * n),
    };
    // Feasible start: A = Y, Z = 0, X = I / (2n) satisfies the dual equations exactly.
    let mut x0 = ycoords;
    x0[0] = 2.0 * y.frobenius_norm() + 1.0;
    let big_x0 = HermitianMatrix::identity(2 * n).scale(0.5 / n as f64);
    let out = ipm::solve(
        &prob,
        x0,
        big_x0,
        &IpmOptions {
            tol: opts.tol,
            max_iter: opts.max_iter,
        },
    );
    let z = layout.z_from(&out.x);
    let a = layout.a_from(&out.x);
    let y_norm2 = y.frobenius_norm().powi(2);
    let stats = SdpStats {
        objective: out.objective + lambda * y_norm2,
        ..stats_of(&out)
    };
    if !opts.accepts(&out) {
        return Err(Box::new(SolverFailure {
            reason: out.note.to_string(),
            stats,
            best_z: z,
            best_a: Some(a),
        })
        .into());
    }
    let rep = representor(&a, z, stats)?;
    Ok(ProxResult { a, rep })
}
