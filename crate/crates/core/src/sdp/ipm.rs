//! Primal-dual interior-point method for a convex quadratic objective under one
//! Hermitian linear matrix inequality:
//!
//! ```text
//! minimize    c^T x + 1/2 sum_j q_j x_j^2
//! subject to  S(x) = G_0 + sum_j x_j G_j  is positive semidefinite
//! ```
//!
//! The dual variable `X` is PSD with `c + q . x = G^*(X)`. Search directions use
//! Nesterov-Todd scaling with a Mehrotra predictor-corrector; the Schur system is
//! assembled directly from the sparse coefficient matrices `G_j`, which in this
//! crate have at most `2n` nonzeros each.

use crate::linalg::chol::{cholesky_upper, upper_triangular_inverse, RealCholesky};
use crate::linalg::{herm_eigenvalues, svd, ComplexMatrix, HermitianMatrix, C64};

/// Sparse Hermitian coefficient matrix: `(row, col, value)` triplets, both triangles listed.
#[derive(Debug, Clone, Default)]
pub(crate) struct SparseHerm {
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseHerm {
    pub fn push(&mut self, i: usize, j: usize, v: C64) {
        self.entries.push((i, j, v));
    }

    /// `Re tr(G X)`.
    fn trace_with(&self, x: &ComplexMatrix) -> f64 {
        self.entries.iter().map(|&(p, q, c)| (c * x[(q, p)]).re).sum()
    }
}

pub(crate) struct LmiProblem {
    pub dim: usize,
    pub c: Vec<f64>,
    pub q: Vec<f64>,
    pub g: Vec<SparseHerm>,
    pub g0: ComplexMatrix,
}

pub(crate) struct IpmOptions {
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct IpmOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub gap: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub note: &'static str,
}

impl LmiProblem {
    fn slack(&self, x: &[f64]) -> HermitianMatrix {
        let mut s = self.g0.clone();
        for (xj, g) in x.iter().zip(&self.g) {
            for &(p, q, c) in &g.entries {
                s[(p, q)] += c * *xj;
            }
        }
        HermitianMatrix::from_lower(&s)
    }

    fn apply(&self, dx: &[f64]) -> HermitianMatrix {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for (xj, g) in dx.iter().zip(&self.g) {
            for &(p, q, c) in &g.entries {
                s[(p, q)] += c * *xj;
            }
        }
        HermitianMatrix::from_lower(&s)
    }

    fn adjoint(&self, x: &ComplexMatrix) -> Vec<f64> {
        self.g.iter().map(|g| g.trace_with(x)).collect()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.c)
            .zip(&self.q)
            .map(|((x, c), q)| c * x + 0.5 * q * x * x)
            .sum()
    }

    fn dual_residual(&self, x: &[f64], big_x: &ComplexMatrix) -> Vec<f64> {
        let gx = self.adjoint(big_x);
        (0..x.len())
            .map(|j| self.c[j] + self.q[j] * x[j] - gx[j])
            .collect()
    }

    /// Schur complement `M_ij = Re tr(G_i W G_j W) + q_i delta_ij` for Hermitian `W`.
    fn schur(&self, w: &ComplexMatrix) -> Vec<f64> {
        let m = self.g.len();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..=i {
                let mut s = 0.0;
                for &(p, q, a) in &self.g[i].entries {
                    for &(r, t, b) in &self.g[j].entries {
                        s += (a * b * w[(q, r)] * w[(t, p)]).re;
                    }
                }
                out[i * m + j] = s;
                out[j * m + i] = s;
            }
            out[i * m + i] += self.q[i];
        }
        out
    }
}

/// Largest step `alpha` with `base + alpha * dir` PSD, given `base = R^* R`.
fn max_step(r_inv: &ComplexMatrix, dir: &HermitianMatrix) -> f64 {
    let scaled = dir.congruence(r_inv);
    match herm_eigenvalues(&scaled) {
        Ok(ev) => {
            let lmin = *ev.last().unwrap();
            if lmin < 0.0 {
                -1.0 / lmin
            } else {
                f64::INFINITY
            }
        }
        Err(_) => 0.0,
    }
}

/// Cholesky of the Schur matrix, shifting the diagonal when it is numerically
/// singular; near the optimum it becomes ill-conditioned well before the gap closes.
fn factor_regularized(schur: &[f64], m: usize) -> Option<RealCholesky> {
    if let Some(c) = RealCholesky::factor(schur, m) {
        return Some(c);
    }
    let mut schur = schur.to_vec();
    let max_diag = (0..m).map(|i| schur[i * m + i].abs()).fold(0.0, f64::max);
    let mut shift = 1e-14 * max_diag.max(f64::MIN_POSITIVE);
    let mut applied = 0.0;
    while shift <= 1e-6 * max_diag {
        for i in 0..m {
            schur[i * m + i] += shift - applied;
        }
        applied = shift;
        if let Some(c) = RealCholesky::factor(&schur, m) {
            return Some(c);
        }
        shift *= 100.0;
    }
    None
}

/// Solves `M dx = rhs` with a (possibly shifted) factor of `M`, then applies
/// two steps of iterative refinement against the unshifted `M`.
fn refine(schur: &[f64], m: usize, chol: &RealCholesky, rhs: &[f64]) -> Vec<f64> {
    let mut dx = chol.solve(rhs);
    for _ in 0..2 {
        let res: Vec<f64> = (0..m)
            .map(|i| rhs[i] - (0..m).map(|j| schur[i * m + j] * dx[j]).sum::<f64>())
            .collect();
        let corr = chol.solve(&res);
        dx.iter_mut().zip(&corr).for_each(|(x, c)| *x += c);
    }
    dx
}

struct Scaling {
    /// `G^{-1}` with `S = G V G^*`, `X = G^{-*} V G^{-1}`, `V = diag(v)`.
    g_inv: ComplexMatrix,
    g: ComplexMatrix,
    w_inv: ComplexMatrix,
    v: Vec<f64>,
}

fn nt_scaling(rs: &ComplexMatrix, rx: &ComplexMatrix, rs_inv: &ComplexMatrix) -> Option<Scaling> {
    let t = rs.matmul(&rx.adjoint());
    let dec = svd(&t).ok()?;
    let dim = rs.rows();
    if dec.sigma.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let mut g_inv = dec.u.adjoint().matmul(&rs_inv.adjoint());
    let mut g = rs.adjoint().matmul(&dec.u);
    for i in 0..dim {
        let s = dec.sigma[i].sqrt();
        for j in 0..dim {
            g_inv[(i, j)] *= s;
            g[(j, i)] /= s;
        }
    }
    let w_inv = g_inv.adjoint().matmul(&g_inv);
    Some(Scaling {
        g_inv,
        g,
        w_inv,
        v: dec.sigma,
    })
}

impl Scaling {
    /// Solves `V o D = R` (Jordan product) for Hermitian `D` with `V` diagonal.
    fn lyapunov(&self, r: &ComplexMatrix) -> ComplexMatrix {
        let n = self.v.len();
        ComplexMatrix::from_fn(n, n, |i, j| r[(i, j)] * (2.0 / (self.v[i] + self.v[j])))
    }
}

pub(crate) fn solve(
    prob: &LmiProblem,
    mut x: Vec<f64>,
    mut big_x: HermitianMatrix,
    opts: &IpmOptions,
) -> IpmOutcome {
    let dim = prob.dim;
    let m = x.len();
    let c_scale = 1.0 + prob.c.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut best: Option<IpmOutcome> = None;
    let mut note = "iteration limit";

    for iter in 0..=opts.max_iter {
        let s = prob.slack(&x);
        let rd = prob.dual_residual(&x, big_x.as_matrix());
        let rd_norm = rd.iter().fold(0.0f64, |a, &b| a.max(b.abs())) / c_scale;
        let gap = big_x.as_matrix().inner(s.as_matrix()).max(0.0);
        let objective = prob.objective(&x);
        let outcome = IpmOutcome {
            x: x.clone(),
            objective,
            gap,
            dual_residual: rd_norm,
            iterations: iter,
            converged: gap <= opts.tol * (1.0 + objective.abs()) && rd_norm <= opts.tol,
            note: "",
        };
        let improves = best
            .as_ref()
            .is_none_or(|b| gap.max(rd_norm) < b.gap.max(b.dual_residual));
        if outcome.converged {
            return IpmOutcome {
                note: "converged",
                ..outcome
            };
        }
        if improves {
            best = Some(outcome);
        }
        if iter == opts.max_iter {
            break;
        }

        let (Some(rs), Some(rx)) = (cholesky_upper(&s), cholesky_upper(&big_x)) else {
            note = "lost positive definiteness";
            break;
        };
        let rs_inv = upper_triangular_inverse(&rs);
        let rx_inv = upper_triangular_inverse(&rx);
        let Some(sc) = nt_scaling(&rs, &rx, &rs_inv) else {
            note = "scaling breakdown";
            break;
        };
        let mu = gap / dim as f64;

        let schur = prob.schur(&sc.w_inv);
        let Some(chol) = factor_regularized(&schur, m) else {
            note = "singular Schur complement";
            break;
        };

        let direction = |r: &ComplexMatrix| -> (Vec<f64>, HermitianMatrix, HermitianMatrix) {
            let d = sc.lyapunov(r);
            let p = sc.g_inv.adjoint().matmul(&d).matmul(&sc.g_inv);
            let gp = prob.adjoint(&p);
            let rhs: Vec<f64> = (0..m).map(|j| -rd[j] + gp[j]).collect();
            let dx = refine(&schur, m, &chol, &rhs);
            let ds = prob.apply(&dx);
            let wdw = sc.w_inv.matmul(ds.as_matrix()).matmul(&sc.w_inv);
            let dxx = HermitianMatrix::from_lower(&(&p - &wdw));
            (dx, ds, dxx)
        };

        // Predictor.
        let mut r_aff = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            r_aff[(i, i)] = C64::new(-sc.v[i] * sc.v[i], 0.0);
        }
        let (_, ds_a, dx_a) = direction(&r_aff);
        let a_aff = max_step(&rs_inv, &ds_a)
            .min(max_step(&rx_inv, &dx_a))
            .min(1.0);
        let s_aff = s.add(&ds_a.scale(a_aff));
        let x_aff = big_x.add(&dx_a.scale(a_aff));
        let mu_aff = x_aff.as_matrix().inner(s_aff.as_matrix()).max(0.0) / dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector with the second-order term in the scaled space.
        let dxt = sc.g.adjoint().matmul(dx_a.as_matrix()).matmul(&sc.g);
        let dst = sc.g_inv.matmul(ds_a.as_matrix()).matmul(&sc.g_inv.adjoint());
        let prod = dxt.matmul(&dst);
        let mut r_cor = (&prod + &prod.adjoint()).scale(-0.5);
        for i in 0..dim {
            r_cor[(i, i)] += C64::new(sigma * mu - sc.v[i] * sc.v[i], 0.0);
        }
        let (dx, ds, dxx) = direction(&r_cor);
        let alpha_max = max_step(&rs_inv, &ds).min(max_step(&rx_inv, &dxx));
        let alpha = (0.98 * alpha_max).min(1.0);
        if !(alpha > 1e-12) {
            note = "step length collapsed";
            break;
        }
        for j in 0..m {
            x[j] += alpha * dx[j];
        }
        big_x = big_x.add(&dxx.scale(alpha));
    }
    let mut out = best.expect("at least one iterate evaluated");
    out.note = note;
    out
}
