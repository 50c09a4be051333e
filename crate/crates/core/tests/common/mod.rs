//! Generators and property checks shared by the property and acceptance suites.
//!
//! Every check returns `Err(message)` on the first violated assertion so that the
//! proptest suite and the acceptance runner can report it in their own way.
#![allow(dead_code)]

use std::sync::OnceLock;

use numrad::ando::{
    ando_from_representor, canonical_representor, multiplicity, pencil_singularity,
    property_measures, AndoFactors,
};
use numrad::certificate::{
    certificate_residual, disk_defect, is_strongly_certified, Thresholds,
};
use numrad::examples::{jordan_block, non_spanning_disk, shift_two};
use numrad::experiment::{random_unit_matrix, trial_rng};
use numrad::linalg::{
    herm_eig, herm_eigenvalues, lambda_max, nearest_unitary, null_space, psd_sqrt,
    singular_values, svd, unitarity_residual,
};
use numrad::radius::{divergence, radius_boundary, ScanConfig};
use numrad::sdp::{build_phi, solve_prox_sdp, solve_radius_sdp, SdpOptions};
use numrad::{ComplexMatrix, HermitianMatrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

// ---------------------------------------------------------------- generators

pub fn rng(seed: u64) -> ChaCha8Rng {
    trial_rng(seed, 0x7e57)
}

/// Complex Gaussian matrix with unit Frobenius norm.
pub fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    random_unit_matrix(n, rng)
}

pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    nearest_unitary(&gaussian(n, rng)).expect("polar factor")
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&gaussian(n, rng))
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

/// `Q M Q^*`.
pub fn conjugate(m: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    q.matmul(m).matmul(&q.adjoint())
}

fn conjugate_h(h: &HermitianMatrix, q: &ComplexMatrix) -> HermitianMatrix {
    h.congruence(&q.adjoint())
}

pub fn boundary(a: &ComplexMatrix) -> f64 {
    radius_boundary(a, &ScanConfig::default()).expect("boundary radius").radius
}

pub fn solver_opts() -> SdpOptions {
    SdpOptions {
        tol: 1e-10,
        max_iter: 120,
        accept_tol: Some(1e-9),
    }
}

/// Disk matrix built by unitary similarity and complex scaling from a Jordan
/// block or the strongly certified 2x2 example, embedded in a larger order
/// by a direct sum with a scaled copy of a smaller Jordan block when needed.
pub fn constructed_disk(n: usize, seed: u64) -> ComplexMatrix {
    let mut g = rng(seed);
    let base = if seed.is_multiple_of(3) && n >= 2 {
        // W(A (+) B) is the hull of W(A) and W(B), and W(J_k / 2) sits inside the unit disk.
        let mut m = ComplexMatrix::zeros(n, n);
        m.set_block(0, 0, &shift_two());
        if n > 2 {
            let inner = jordan_block(n - 2).scale(0.5);
            m.set_block(2, 2, &inner);
        }
        m
    } else {
        jordan_block(n)
    };
    let q = random_unitary(n, &mut g);
    conjugate(&base, &q).scale_c(random_complex(&mut g) + C64::new(0.1, 0.0))
}

/// `(A, S, U, C)` with `A = 2 S U C` of unit radius and generic (non-disk) structure:
/// `Z = Q diag(0, z_2, ..., z_n) Q^*`, `U = Q (1 (+) V) Q^*`, so the first column
/// of `Q` attains `x^* A x = 1`.
pub fn ando_generic(n: usize, seed: u64) -> (ComplexMatrix, HermitianMatrix, ComplexMatrix, HermitianMatrix) {
    let mut g = rng(seed ^ 0xa5a5);
    let q = random_unitary(n, &mut g);
    let z: Vec<f64> = (0..n)
        .map(|k| if k == 0 { 0.0 } else { g.random_range(-0.95..0.95) })
        .collect();
    let s_diag: Vec<f64> = z.iter().map(|&t| ((1.0 - t) / 2.0).sqrt()).collect();
    let c_diag: Vec<f64> = z.iter().map(|&t| ((1.0 + t) / 2.0).sqrt()).collect();
    let s = conjugate_h(&HermitianMatrix::from_real_diag(&s_diag), &q);
    let c = conjugate_h(&HermitianMatrix::from_real_diag(&c_diag), &q);
    let mut inner = ComplexMatrix::identity(n);
    if n > 1 {
        inner.set_block(1, 1, &random_unitary(n - 1, &mut g));
    }
    let u = conjugate(&inner, &q);
    let a = s.as_matrix().matmul(&u).matmul(c.as_matrix()).scale(2.0);
    (a, s, u, c)
}

/// Exact factors of the 3x3 non-spanning disk example.
pub fn non_spanning_factors() -> (HermitianMatrix, ComplexMatrix, HermitianMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = HermitianMatrix::from_real_diag(&[1.0, h, 0.0]);
    let c = HermitianMatrix::from_real_diag(&[0.0, h, 1.0]);
    let u = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 1.0, 0.6, 0.8, 0.0, 0.8, -0.6, 0.0]);
    (s, u, c)
}

/// Ando factors of a unit-radius matrix obtained from the SDP representor.
pub fn solver_factors(a: &ComplexMatrix) -> Result<(f64, AndoFactors), String> {
    let rep = solve_radius_sdp(a, &solver_opts()).map_err(e)?;
    let f = ando_from_representor(a, &rep.z, rep.radius).map_err(e)?;
    Ok((rep.radius, f))
}

pub struct PencilCase {
    pub label: String,
    pub a: ComplexMatrix,
    pub s: HermitianMatrix,
    pub u: ComplexMatrix,
    pub c: HermitianMatrix,
    pub disk: bool,
}

/// Ten disk and ten non-disk matrices of unit radius, each with Ando factors.
pub fn pencil_corpus() -> Vec<PencilCase> {
    let mut out = Vec::new();
    let mut g = rng(2024);
    for k in 0..4 {
        let q = random_unitary(2, &mut g);
        let s = HermitianMatrix::from_real_diag(&[1.0, 0.0]);
        let c = HermitianMatrix::from_real_diag(&[0.0, 1.0]);
        let u = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        out.push(PencilCase {
            label: format!("conjugated shift {k}"),
            a: conjugate(&shift_two(), &q),
            s: conjugate_h(&s, &q),
            u: conjugate(&u, &q),
            c: conjugate_h(&c, &q),
            disk: true,
        });
    }
    for k in 0..3 {
        let q = random_unitary(3, &mut g);
        let (s, u, c) = non_spanning_factors();
        out.push(PencilCase {
            label: format!("conjugated non-spanning disk {k}"),
            a: conjugate(&non_spanning_disk(), &q),
            s: conjugate_h(&s, &q),
            u: conjugate(&u, &q),
            c: conjugate_h(&c, &q),
            disk: true,
        });
    }
    for n in 3..=5 {
        let j = jordan_block(n);
        let (r, f) = solver_factors(&j).expect("Jordan block factors");
        out.push(PencilCase {
            label: format!("Jordan block {n}"),
            a: j.scale(1.0 / r),
            s: f.s,
            u: f.u,
            c: f.c,
            disk: true,
        });
    }
    for k in 0..10u64 {
        let n = 2 + (k as usize % 4);
        let (a, s, u, c) = ando_generic(n, 100 + k);
        out.push(PencilCase {
            label: format!("generic factors n={n} #{k}"),
            a,
            s,
            u,
            c,
            disk: false,
        });
    }
    out
}

/// Disk matrices produced by the prox experiment (n = 2, 3), computed once.
pub fn prox_disk_matrices() -> &'static [ComplexMatrix] {
    static CACHE: OnceLock<Vec<ComplexMatrix>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let jobs: Vec<(usize, u64)> = (2..=3).flat_map(|n| (0..40u64).map(move |t| (n, t))).collect();
        jobs.par_iter()
            .filter_map(|&(n, t)| {
                let mut g = trial_rng(11, t * 7 + n as u64);
                let y = gaussian(n, &mut g);
                let a = solve_prox_sdp(&y, 0.75, &solver_opts()).ok()?.a;
                let r = boundary(&a);
                (r > 1e-8 && disk_defect(&a, r).ok()? <= 1e-8).then_some(a)
            })
            .collect()
    })
}

// ---------------------------------------------------------------- linalg

pub fn check_eig(n: usize, seed: u64) -> Check {
    let h = random_hermitian(n, &mut rng(seed)).scale(1.0 + seed as f64 % 7.0);
    let dec = herm_eig(&h).map_err(e)?;
    let scale = h.frobenius_norm().max(1.0);
    let rec = (dec.reconstruct().as_matrix() - h.as_matrix()).frobenius_norm();
    ensure!(rec <= 1e-12 * scale, "reconstruction residual {rec:e}");
    let uni = unitarity_residual(&dec.eigenvectors);
    ensure!(uni <= 1e-12 * n as f64, "unitarity residual {uni:e}");
    ensure!(
        dec.eigenvalues.windows(2).all(|w| w[0] >= w[1]),
        "eigenvalues not sorted"
    );
    Ok(())
}

pub fn check_svd(rows: usize, cols: usize, seed: u64) -> Check {
    let mut g = rng(seed);
    let m = ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(&mut g));
    let sig = singular_values(&m).map_err(e)?;
    let gram = HermitianMatrix::from_lower(&m.adjoint().matmul(&m));
    let lam = herm_eigenvalues(&gram).map_err(e)?;
    let smax = sig[0];
    for (j, s) in sig.iter().enumerate() {
        let oracle = lam[j].max(0.0).sqrt();
        ensure!(
            (s - oracle).abs() <= 1e-10 * smax.max(1.0),
            "sigma_{j} = {s:e} vs sqrt(lambda_{j}) = {oracle:e}"
        );
    }
    let dec = svd(&m).map_err(e)?;
    let rec = (&dec.reconstruct() - &m).frobenius_norm();
    ensure!(rec <= 1e-12 * smax.max(1.0) * 10.0, "svd reconstruction {rec:e}");
    Ok(())
}

pub fn check_psd_sqrt(n: usize, seed: u64) -> Check {
    let mut g = rng(seed);
    let b = gaussian(n, &mut g);
    let r = HermitianMatrix::from_lower(&b.adjoint().matmul(&b));
    let r2 = HermitianMatrix::from_lower(&r.as_matrix().matmul(r.as_matrix()));
    let back = psd_sqrt(&r2).map_err(e)?;
    let err = (back.as_matrix() - r.as_matrix()).frobenius_norm();
    ensure!(err <= 1e-9, "psd_sqrt(R^2) - R = {err:e}");
    Ok(())
}

pub fn check_null_space(n: usize, rank: usize, seed: u64) -> Check {
    let mut g = rng(seed);
    let left = ComplexMatrix::from_fn(n + 1, rank, |_, _| random_complex(&mut g));
    let right = ComplexMatrix::from_fn(rank, n, |_, _| random_complex(&mut g));
    let m = left.matmul(&right);
    let basis = null_space(&m, 1e-10).map_err(e)?;
    ensure!(basis.len() == n - rank, "null space dim {} expected {}", basis.len(), n - rank);
    if basis.is_empty() {
        return Ok(());
    }
    let v = ComplexMatrix::from_columns(n, &basis);
    let uni = unitarity_residual(&v);
    ensure!(uni <= 1e-10, "null vectors not orthonormal: {uni:e}");
    let img = m.matmul(&v).frobenius_norm();
    ensure!(img <= 1e-10 * m.frobenius_norm(), "|M v| = {img:e}");
    Ok(())
}

// ---------------------------------------------------------------- radius

pub fn check_norm_axioms(n: usize, seed: u64) -> Check {
    let mut g = rng(seed);
    let a = gaussian(n, &mut g);
    let b = gaussian(n, &mut g).scale(g.random_range(0.1..3.0));
    let c = random_complex(&mut g);
    let (ra, rb, rab) = (boundary(&a), boundary(&b), boundary(&(&a + &b)));
    ensure!(rab <= ra + rb + 1e-8, "triangle: r(A+B) = {rab} > {ra} + {rb}");
    let rca = boundary(&a.scale_c(c));
    ensure!(
        (rca - c.norm() * ra).abs() <= 1e-8 * rca.max(1.0),
        "homogeneity: r(cA) = {rca} vs |c| r(A) = {}",
        c.norm() * ra
    );
    let zero = ComplexMatrix::zeros(n, n);
    ensure!(boundary(&zero) == 0.0, "r(0) != 0");
    ensure!(ra > 1e-8, "nonzero matrix with radius {ra:e}");
    Ok(())
}

pub fn check_power_inequality(n: usize, seed: u64) -> Check {
    let a = gaussian(n, &mut rng(seed)).scale(1.0 + (seed % 5) as f64);
    let r = boundary(&a);
    for k in [2u32, 3] {
        let rk = boundary(&a.pow(k));
        ensure!(rk <= r.powi(k as i32) + 1e-8, "r(A^{k}) = {rk} > r(A)^{k} = {}", r.powi(k as i32));
    }
    Ok(())
}

pub fn check_spectral_sandwich(n: usize, seed: u64) -> Check {
    let a = gaussian(n, &mut rng(seed));
    let r = boundary(&a);
    let smax = singular_values(&a).map_err(e)?[0];
    ensure!(0.5 * smax <= r + 1e-12 && r <= smax + 1e-8, "r = {r} outside [{}, {smax}]", smax / 2.0);
    let div = divergence(&a, r, &ScanConfig::default()).map_err(e)?;
    ensure!(div >= -1e-8, "divergence {div:e} negative");
    Ok(())
}

pub fn check_hermitian_radius(n: usize, seed: u64) -> Check {
    let h = random_hermitian(n, &mut rng(seed));
    let ev = herm_eigenvalues(&h).map_err(e)?;
    let rho = ev[0].abs().max(ev[n - 1].abs());
    let r = boundary(h.as_matrix());
    ensure!((r - rho).abs() <= 1e-10, "r = {r} vs spectral radius {rho}");
    Ok(())
}

// ---------------------------------------------------------------- sdp

pub fn check_oracle_equivalence(a: &ComplexMatrix) -> Check {
    let rep = solve_radius_sdp(a, &SdpOptions::default()).map_err(e)?;
    let rb = boundary(a);
    ensure!(
        (rep.radius - rb).abs() <= 1e-6 * (1.0 + rb),
        "r_sdp = {} vs r_boundary = {rb}",
        rep.radius
    );
    Ok(())
}

pub fn check_representor_feasibility(n: usize, seed: u64) -> Check {
    let a = gaussian(n, &mut rng(seed));
    let rep = solve_radius_sdp(&a, &SdpOptions::default()).map_err(e)?;
    let ev = herm_eigenvalues(&rep.z).map_err(e)?;
    let r = rep.radius;
    ensure!(
        ev[0] <= r + 1e-7 && ev[n - 1] >= -r - 1e-7,
        "Z spectrum [{}, {}] outside +-{r}",
        ev[n - 1],
        ev[0]
    );
    Ok(())
}

pub fn check_prox_nonexpansive(n: usize, seed: u64) -> Check {
    let mut g = rng(seed);
    let y1 = gaussian(n, &mut g);
    let y2 = if seed % 2 == 0 {
        &y1 + &gaussian(n, &mut g).scale(0.05)
    } else {
        gaussian(n, &mut g)
    };
    let p1 = solve_prox_sdp(&y1, 0.75, &solver_opts()).map_err(e)?.a;
    let p2 = solve_prox_sdp(&y2, 0.75, &solver_opts()).map_err(e)?.a;
    let lhs = (&p1 - &p2).frobenius_norm();
    let rhs = (&y1 - &y2).frobenius_norm();
    ensure!(lhs <= rhs + 1e-6, "|prox(Y1) - prox(Y2)| = {lhs} > |Y1 - Y2| = {rhs}");
    Ok(())
}

/// The prox objective `f(B) = r(B) + lambda |B - Y|^2` is `2 lambda`-strongly convex,
/// so its minimizer `A` satisfies `f(B) >= f(A) + lambda |B - A|^2` for every `B`.
/// Radii here come from the boundary oracle only.
pub fn check_prox_growth(n: usize, seed: u64) -> Check {
    let lambda = 0.75;
    let mut g = rng(seed);
    let y = gaussian(n, &mut g);
    let a = solve_prox_sdp(&y, lambda, &solver_opts()).map_err(e)?.a;
    let f = |b: &ComplexMatrix| boundary(b) + lambda * (b - &y).frobenius_norm().powi(2);
    let fa = f(&a);
    for k in 0..8 {
        let step = [1e-1, 1e-2, 1e-3][k % 3];
        let d = gaussian(n, &mut g).scale(step);
        let b = &a + &d;
        let gap = f(&b) - fa - lambda * step * step;
        ensure!(gap >= -1e-7, "f(A + D) - f(A) - lambda|D|^2 = {gap:e} at |D| = {step}");
    }
    Ok(())
}

pub fn check_scaling_covariance(n: usize, seed: u64) -> Check {
    let mut g = rng(seed);
    let a = gaussian(n, &mut g);
    let z = random_hermitian(n, &mut g);
    let c = g.random_range(0.1..10.0);
    let base = lambda_max(&build_phi(&a, &z).map_err(e)?).map_err(e)?;
    let scaled = lambda_max(&build_phi(&a.scale(c), &z.scale(c)).map_err(e)?).map_err(e)?;
    ensure!(
        (scaled - c * base).abs() <= 1e-9 * (c * base).abs().max(1.0),
        "lambda_max(Phi_cA(cZ)) = {scaled} vs c lambda_max = {}",
        c * base
    );
    let rep = solve_radius_sdp(&a, &SdpOptions::default()).map_err(e)?;
    let rep_c = solve_radius_sdp(&a.scale(c), &SdpOptions::default()).map_err(e)?;
    ensure!(
        (rep_c.radius - c * rep.radius).abs() <= 1e-7 * (c * rep.radius).max(1.0),
        "optimal value {} vs c * {}",
        rep_c.radius,
        rep.radius
    );
    Ok(())
}

// ---------------------------------------------------------------- certificate

/// `disk_defect(cA, cr) = disk_defect(A, r)`; bitwise for powers of two, where
/// the normalization is exact, and to rounding otherwise.
pub fn check_disk_scale_invariance(a: &ComplexMatrix, c: f64) -> Check {
    let r = boundary(a);
    let d = disk_defect(a, r).map_err(e)?;
    for k in [-3, 1, 5] {
        let p = 2f64.powi(k);
        let dp = disk_defect(&a.scale(p), p * r).map_err(e)?;
        ensure!(dp.to_bits() == d.to_bits(), "power-of-two scaling {p}: {dp:e} vs {d:e}");
    }
    let dc = disk_defect(&a.scale(c), c * r).map_err(e)?;
    ensure!((dc - d).abs() <= 1e-12, "scaling by {c}: {dc:e} vs {d:e}");
    Ok(())
}

pub fn check_certificate_residual(a: &ComplexMatrix) -> Check {
    let r = boundary(a);
    let rep = is_strongly_certified(a, r, &Thresholds::default()).map_err(e)?;
    if rep.disk_defect > 1e-8 {
        return Ok(());
    }
    let cert = rep.certificate.ok_or("disk defect below threshold but no certificate")?;
    let res = certificate_residual(&a.scale(1.0 / r), &cert);
    ensure!(res <= 1e-6, "certificate residual {res:e}");
    Ok(())
}

pub fn check_disk_double_zero(a: &ComplexMatrix) -> Check {
    let n = a.rows();
    let r = boundary(a);
    let d = disk_defect(a, r).map_err(e)?;
    ensure!(d <= 1e-8, "not a disk matrix: defect {d:e}");
    let sa = singular_values(a).map_err(e)?;
    ensure!(sa[n - 1] <= 1e-6 * sa[0], "sigma_min(A) = {:e}, sigma_max = {:e}", sa[n - 1], sa[0]);
    let s2 = singular_values(&a.matmul(a)).map_err(e)?;
    ensure!(
        s2[n - 2] <= 1e-6 * s2[0].max(1.0),
        "sigma_(n-1)(A^2) = {:e}",
        s2[n - 2]
    );
    Ok(())
}

/// A separated disk matrix with a spanning certificate has a one-dimensional
/// certificate space.
pub fn check_certificate_uniqueness(a: &ComplexMatrix) -> Check {
    let r = boundary(a);
    let th = Thresholds::default();
    let rep = is_strongly_certified(a, r, &th).map_err(e)?;
    if !rep.strongly_certified {
        return Ok(());
    }
    let cert = rep.certificate.expect("strongly certified");
    ensure!(cert.null_dim == 1, "null space dimension {}", cert.null_dim);
    Ok(())
}

// ---------------------------------------------------------------- ando

pub fn check_implication_chain(a: &ComplexMatrix) -> Check {
    let rep = solve_radius_sdp(a, &solver_opts()).map_err(e)?;
    let pm = property_measures(a, &rep.z, rep.radius).map_err(e)?;
    ensure!(pm.m4 <= Thresholds::default().disk, "not a disk matrix: m4 = {:e}", pm.m4);
    ensure!(
        pm.m3 <= 1e-6 && pm.m2 <= 1e-6 && pm.m1 <= 1e-6,
        "m3 = {:e}, m2 = {:e}, m1 = {:e}",
        pm.m3,
        pm.m2,
        pm.m1
    );
    Ok(())
}

pub fn check_canonical_feasible(a_hat: &ComplexMatrix, s: &HermitianMatrix) -> Check {
    let z = canonical_representor(s).map_err(e)?;
    let top = lambda_max(&build_phi(a_hat, &z).map_err(e)?).map_err(e)?;
    ensure!(top <= 1.0 + 1e-7, "lambda_max(Phi(Z_canonical)) = {top}");
    Ok(())
}

/// For a spanning disk matrix the canonical representor of its solver-derived
/// factors has top multiplicity above `n`.
pub fn check_spanning_multiplicity(a: &ComplexMatrix) -> Check {
    let n = a.rows();
    let rb = boundary(a);
    let rep = is_strongly_certified(a, rb, &Thresholds::default()).map_err(e)?;
    ensure!(rep.certificate.is_some(), "not a disk matrix: defect {:e}", rep.disk_defect);
    if rep.spanning_cond < Thresholds::default().spanning {
        return Ok(());
    }
    let (r, f) = solver_factors(a)?;
    let a_hat = a.scale(1.0 / r);
    check_canonical_feasible(&a_hat, &f.s)?;
    let z = canonical_representor(&f.s).map_err(e)?;
    let m = multiplicity(&a_hat, &z, 1.0, 1e-6).map_err(e)?;
    ensure!(m > n, "canonical multiplicity {m} <= n = {n}");
    Ok(())
}

pub fn check_pencil_case(case: &PencilCase) -> Check {
    let rb = boundary(&case.a);
    ensure!((rb - 1.0).abs() <= 1e-8, "{}: radius {rb} != 1", case.label);
    let rec = (&case.s.as_matrix().matmul(&case.u).matmul(case.c.as_matrix()).scale(2.0) - &case.a)
        .frobenius_norm();
    ensure!(rec <= 1e-8, "{}: factor residual {rec:e}", case.label);
    check_canonical_feasible(&case.a, &case.s).map_err(|m| format!("{}: {m}", case.label))?;
    let pencil = pencil_singularity(&case.u, &case.c, &case.s).map_err(e)?;
    let defect = disk_defect(&case.a, 1.0).map_err(e)?;
    let singular = pencil.is_singular(1e-7);
    let disk = defect <= 1e-7;
    ensure!(
        singular == disk && disk == case.disk,
        "{}: pencil {:e} (singular {singular}), disk defect {defect:e} (disk {disk}), expected disk {}",
        case.label,
        pencil.max_sigma_min,
        case.disk
    );
    Ok(())
}

pub fn check_rank_consequence(a: &ComplexMatrix, z: &HermitianMatrix, r: f64) -> Check {
    let n = a.rows();
    let pm = property_measures(a, z, r).map_err(e)?;
    if pm.m3 > 1e-8 {
        return Ok(());
    }
    let zh = z.scale(1.0 / r);
    let z2 = zh.as_matrix().matmul(zh.as_matrix());
    let m = &ComplexMatrix::identity(n) - &z2;
    let s = singular_values(&m).map_err(e)?;
    ensure!(s[n - 2] <= 1e-6, "sigma_(n-1)(I - Z^2) = {:e}", s[n - 2]);
    Ok(())
}
