//! Numerical radius and circle-parameterized measures from the support function
//! of the field of values.
//!
//! For `w = e^{i theta}` the support function of `W(A)` in direction `w` is
//! `h(theta) = lambda_max(conj(w) A + w A^*) / 2`. The radius is its maximum over
//! the circle; a disk matrix has constant `h`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, ComplexMatrix, HermitianMatrix, C64};

/// Sampling density and refinement tolerance for circle scans.
#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub samples: usize,
    pub angle_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            samples: 1024,
            angle_tol: 1e-12,
        }
    }
}

/// Result of optimizing a function over the unit circle.
#[derive(Debug, Clone)]
pub struct CircleScan {
    pub sample_count: usize,
    pub refined_angle: f64,
    pub refined_value: f64,
    pub profile: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    Boundary,
    Sdp,
}

#[derive(Debug, Clone)]
pub struct RadiusResult {
    pub radius: f64,
    pub witness_angle: f64,
    pub method: RadiusMethod,
}

/// `conj(w) A + w A^*` for `w = e^{i theta}`.
pub fn rotated_hermitian_part(a: &ComplexMatrix, theta: f64) -> HermitianMatrix {
    let w = C64::from_polar(1.0, -theta);
    let b = a.scale_c(w);
    HermitianMatrix::from_lower(&(&b + &b.adjoint()))
}

/// Support function of `W(A)` in direction `e^{i theta}`.
pub fn support_value(a: &ComplexMatrix, theta: f64) -> Result<f64> {
    check_square(a)?;
    Ok(0.5 * herm_eigenvalues(&rotated_hermitian_part(a, theta))?[0])
}

/// Gap between the two largest eigenvalues of `conj(w) A + w A^*`.
pub fn eigen_gap(a: &ComplexMatrix, theta: f64) -> Result<f64> {
    check_square(a)?;
    let ev = herm_eigenvalues(&rotated_hermitian_part(a, theta))?;
    Ok(if ev.len() < 2 { f64::INFINITY } else { ev[0] - ev[1] })
}

/// Maximizes (`maximize = true`) or minimizes `f` over `[0, 2 pi)`.
pub fn scan_circle(
    f: impl Fn(f64) -> Result<f64>,
    cfg: &ScanConfig,
    maximize: bool,
) -> Result<CircleScan> {
    let n = cfg.samples.max(3);
    let sign = if maximize { -1.0 } else { 1.0 };
    let mut profile = Vec::with_capacity(n);
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        profile.push((theta, f(theta)?));
    }
    let step = TAU / n as f64;

    // Refine around every sampled local optimum within a small margin of the best,
    // which covers profiles with several near-equal optima.
    let best = profile
        .iter()
        .map(|&(_, v)| sign * v)
        .fold(f64::INFINITY, f64::min);
    let spread = profile
        .iter()
        .map(|&(_, v)| sign * v - best)
        .fold(0.0, f64::max);
    let margin = 1e-3 * spread;
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let v = sign * profile[k].1;
            let prev = sign * profile[(k + n - 1) % n].1;
            let next = sign * profile[(k + 1) % n].1;
            v <= prev && v <= next && v <= best + margin
        })
        .collect();
    candidates.sort_by(|&i, &j| (sign * profile[i].1).total_cmp(&(sign * profile[j].1)));
    candidates.truncate(4);

    let mut best_angle = candidates.first().map(|&k| profile[k].0).unwrap_or(0.0);
    let mut best_value = best;
    for &k in &candidates {
        let center = profile[k].0;
        let (angle, value) =
            golden_section(|t| Ok(sign * f(t)?), center - step, center + step, cfg.angle_tol)?;
        if value < best_value {
            best_value = value;
            best_angle = angle;
        }
    }
    Ok(CircleScan {
        sample_count: n,
        refined_angle: best_angle.rem_euclid(TAU),
        refined_value: sign * best_value,
        profile,
    })
}

fn golden_section(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Numerical radius as the maximum of the support function over the circle.
pub fn radius_boundary(a: &ComplexMatrix, cfg: &ScanConfig) -> Result<RadiusResult> {
    check_square(a)?;
    if a.max_abs() == 0.0 {
        return Ok(RadiusResult {
            radius: 0.0,
            witness_angle: 0.0,
            method: RadiusMethod::Boundary,
        });
    }
    let scan = scan_circle(|t| support_value(a, t), cfg, true)?;
    Ok(RadiusResult {
        radius: scan.refined_value,
        witness_angle: scan.refined_angle,
        method: RadiusMethod::Boundary,
    })
}

/// `1 - min_theta h(theta) / r`: zero exactly when the support function is constant.
pub fn divergence(a: &ComplexMatrix, r: f64, cfg: &ScanConfig) -> Result<f64> {
    check_square(a)?;
    if !(r > 0.0) {
        return Err(Error::Degenerate(format!(
            "divergence needs a positive radius, got {r}"
        )));
    }
    let scan = scan_circle(|t| support_value(a, t), cfg, false)?;
    Ok(1.0 - scan.refined_value / r)
}

/// Minimum over the circle of the top eigenvalue gap; positive iff `A` is separated.
pub fn separation(a: &ComplexMatrix, cfg: &ScanConfig) -> Result<f64> {
    check_square(a)?;
    if a.rows() < 2 {
        return Err(Error::DimensionMismatch(
            "separation needs order at least 2".into(),
        ));
    }
    let scan = scan_circle(|t| eigen_gap(a, t), cfg, false)?;
    Ok(scan.refined_value.max(0.0))
}

/// `|A - (tr A / n) I|_F <= 1e-10 |A|_F`.
pub fn is_identity_multiple(a: &ComplexMatrix) -> bool {
    let n = a.rows();
    let mean = a.trace() / n as f64;
    let mut d = a.clone();
    for i in 0..n {
        d[(i, i)] -= mean;
    }
    d.frobenius_norm() <= 1e-10 * a.frobenius_norm()
}

fn check_square(a: &ComplexMatrix) -> Result<()> {
    if a.is_square() && a.rows() > 0 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}
