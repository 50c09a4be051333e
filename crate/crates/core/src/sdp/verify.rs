//! Solver-independent optimality checks for prox candidates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::RepresentorResult;
use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64};
use crate::radius::{radius_boundary, ScanConfig};

const DIRECTIONS: usize = 16;
const STEP: f64 = 1e-5;
const DIRECTION_SEED: u64 = 0x5eed_0f_d1;

#[derive(Debug, Clone)]
pub struct ProxOptimalityReport {
    /// `lambda_max(Phi_A(Z)) + lambda |A - Y|^2` at the candidate.
    pub objective: f64,
    pub objective_at_zero: f64,
    pub objective_at_input: f64,
    /// `max(0, objective - min(objective_at_zero, objective_at_input))`.
    pub reference_violation: f64,
    /// Largest negative one-sided difference quotient over the probe directions.
    pub directional_violation: f64,
    pub max_violation: f64,
}

/// Checks a prox candidate `A` against the reference points `0` and `Y` and probes
/// one-sided directional derivatives of `r(.) + lambda |. - Y|^2` at `A` along
/// 16 fixed pseudo-random unit directions plus the directions toward `0` and `Y`.
/// Radii are taken from the boundary oracle, not the SDP.
pub fn verify_prox_optimality(
    y: &ComplexMatrix,
    a: &ComplexMatrix,
    lambda: f64,
    rep: &RepresentorResult,
) -> Result<ProxOptimalityReport> {
    let cfg = ScanConfig::default();
    let f = |m: &ComplexMatrix| -> Result<f64> {
        Ok(radius_boundary(m, &cfg)?.radius + lambda * (m - y).frobenius_norm().powi(2))
    };
    let objective = rep.radius + lambda * (a - y).frobenius_norm().powi(2);
    let objective_at_zero = lambda * y.frobenius_norm().powi(2);
    let objective_at_input = radius_boundary(y, &cfg)?.radius;
    let reference_violation = (objective - objective_at_zero.min(objective_at_input)).max(0.0);

    let (rows, cols) = (a.rows(), a.cols());
    let mut rng = ChaCha8Rng::seed_from_u64(DIRECTION_SEED);
    let mut directions: Vec<ComplexMatrix> = (0..DIRECTIONS)
        .map(|_| {
            ComplexMatrix::from_fn(rows, cols, |_, _| {
                C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            })
        })
        .collect();
    directions.push(-a);
    directions.push(y - a);

    let base = f(a)?;
    let mut worst = 0.0f64;
    for d in directions {
        let nd = d.frobenius_norm();
        if nd == 0.0 {
            continue;
        }
        let d = d.scale(1.0 / nd);
        for sign in [1.0, -1.0] {
            let probe = a + &d.scale(sign * STEP);
            let slope = (f(&probe)? - base) / STEP;
            worst = worst.max(-slope);
        }
    }
    Ok(ProxOptimalityReport {
        objective,
        objective_at_zero,
        objective_at_input,
        reference_violation,
        directional_violation: worst,
        max_violation: reference_violation.max(worst),
    })
}
