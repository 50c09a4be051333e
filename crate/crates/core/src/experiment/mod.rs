//! The random prox experiment: unit-norm Gaussian inputs, prox under the numerical
//! radius, a representor for the output, the full measure battery, and a ranking by
//! divergence.

mod report;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub use report::{
    covanishing_report, emit_report, read_csv, write_csv, write_svg, CovanishingSummary, ReportFormat,
    CSV_HEADER,
};

use crate::ando::property_measures;
use crate::certificate::{is_strongly_certified, Thresholds};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::radius::{divergence, is_identity_multiple, radius_boundary, ScanConfig};
use crate::sdp::{solve_prox_sdp, solve_radius_sdp, SdpOptions};

/// Prox outputs with Frobenius norm at or below this are treated as zero.
pub const DEGENERATE_NORM: f64 = 1e-8;
/// Allowed relative disagreement between the SDP and boundary radii.
pub const RADIUS_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub lambda: f64,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub solver_tol: f64,
    /// Near-optimal acceptance level when the solver stalls short of `solver_tol`.
    pub solver_accept_tol: f64,
    /// Ambiguity band `(low, high)` for the co-vanishing analysis.
    pub band: (f64, f64),
    pub output_dir: Option<PathBuf>,
    /// Worker cap; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 3,
            trials: 200,
            lambda: 0.75,
            seed: 0,
            thresholds: Thresholds::default(),
            solver_tol: 1e-10,
            solver_accept_tol: 1e-9,
            band: (1e-5, 1e-3),
            output_dir: None,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        let th = &self.thresholds;
        for (name, v) in [
            ("lambda", self.lambda),
            ("disk threshold", th.disk),
            ("separation threshold", th.separation),
            ("spanning threshold", th.spanning),
            ("solver tolerance", self.solver_tol),
            ("solver acceptance tolerance", self.solver_accept_tol),
            ("band low", self.band.0),
            ("band high", self.band.1),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.band.0 >= self.band.1 {
            return bad(format!("band must satisfy low < high, got {:?}", self.band));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }
}

/// One row of the experiment. Measures of degenerate or failed trials are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRecord {
    pub trial_id: u64,
    pub n: usize,
    pub seed: u64,
    /// Position in ascending divergence among ranked records.
    pub rank: Option<usize>,
    pub radius: f64,
    pub divergence: f64,
    pub delta_defect: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m5: f64,
    pub separation: f64,
    pub spanning_cond: f64,
    pub solver_gap: f64,
    pub identity_multiple: bool,
    pub classified_disk: bool,
    pub strongly_certified: bool,
    pub degenerate: bool,
    pub failed: bool,
    /// Why the trial failed; not part of the CSV.
    pub failure: Option<String>,
}

impl MeasureRecord {
    fn blank(trial_id: u64, n: usize, seed: u64) -> Self {
        Self {
            trial_id,
            n,
            seed,
            rank: None,
            radius: f64::NAN,
            divergence: f64::NAN,
            delta_defect: f64::NAN,
            m1: f64::NAN,
            m2: f64::NAN,
            m3: f64::NAN,
            m5: f64::NAN,
            separation: f64::NAN,
            spanning_cond: f64::NAN,
            solver_gap: f64::NAN,
            identity_multiple: false,
            classified_disk: false,
            strongly_certified: false,
            degenerate: false,
            failed: false,
            failure: None,
        }
    }

    pub fn is_ranked_candidate(&self) -> bool {
        !self.degenerate && !self.failed
    }

    /// `[divergence, m1, m2, m3, m4, m5]`.
    pub fn measures(&self) -> [f64; 6] {
        [
            self.divergence,
            self.m1,
            self.m2,
            self.m3,
            self.delta_defect,
            self.m5,
        ]
    }
}

/// Complex Gaussian matrix (independent standard normal real and imaginary parts)
/// scaled to unit Frobenius norm.
pub fn random_unit_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = m.frobenius_norm();
        if norm > 0.0 {
            return m.scale(1.0 / norm);
        }
    }
}

/// Generator for trial `trial_id`: the seed selects the key, the trial the stream.
pub fn trial_rng(seed: u64, trial_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_id);
    rng
}

/// The input matrix of trial `trial_id`.
pub fn trial_input(cfg: &ExperimentConfig, trial_id: u64) -> ComplexMatrix {
    random_unit_matrix(cfg.n, &mut trial_rng(cfg.seed, trial_id))
}

/// Prox, representor and measure battery for one input.
pub fn run_trial(y: &ComplexMatrix, trial_id: u64, cfg: &ExperimentConfig) -> MeasureRecord {
    let mut rec = MeasureRecord::blank(trial_id, y.rows(), cfg.seed);
    if let Err(e) = fill_record(y, cfg, &mut rec) {
        rec.failed = true;
        rec.failure = Some(e.to_string());
        rec.classified_disk = false;
        rec.strongly_certified = false;
    }
    rec
}

fn fill_record(y: &ComplexMatrix, cfg: &ExperimentConfig, rec: &mut MeasureRecord) -> Result<()> {
    let opts = SdpOptions {
        accept_tol: Some(cfg.solver_accept_tol.max(cfg.solver_tol)),
        ..SdpOptions::with_tol(cfg.solver_tol)
    };
    let prox = solve_prox_sdp(y, cfg.lambda, &opts)?;
    let a = prox.a;
    rec.solver_gap = prox.rep.stats.duality_gap;
    if a.frobenius_norm() <= DEGENERATE_NORM {
        rec.degenerate = true;
        rec.radius = 0.0;
        return Ok(());
    }

    let rep = solve_radius_sdp(&a, &opts)?;
    rec.solver_gap = rec.solver_gap.max(rep.stats.duality_gap);
    let scan = ScanConfig::default();
    let r_boundary = radius_boundary(&a, &scan)?.radius;
    let r = rep.radius;
    if (r - r_boundary).abs() > RADIUS_AGREEMENT * (1.0 + r_boundary) {
        return Err(Error::Degenerate(format!(
            "SDP radius {r:.16e} disagrees with boundary radius {r_boundary:.16e}"
        )));
    }
    rec.radius = r_boundary;
    rec.divergence = divergence(&a, r_boundary, &scan)?;
    rec.identity_multiple = is_identity_multiple(&a);

    let m = property_measures(&a, &rep.z, r)?;
    rec.m1 = m.m1;
    rec.m2 = m.m2;
    rec.m3 = m.m3;
    rec.m5 = m.m5;

    let cert = is_strongly_certified(&a, r_boundary, &cfg.thresholds)?;
    rec.delta_defect = cert.disk_defect;
    rec.separation = cert.separation;
    rec.spanning_cond = cert.spanning_cond;
    rec.classified_disk = cert.disk_defect <= cfg.thresholds.disk && !rec.identity_multiple;
    rec.strongly_certified = rec.classified_disk && cert.strongly_certified;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Ranked records by ascending divergence, then unranked ones by trial id.
    pub records: Vec<MeasureRecord>,
    pub failures: usize,
    pub degenerate: usize,
}

impl ExperimentOutcome {
    pub fn ranked(&self) -> impl Iterator<Item = &MeasureRecord> {
        self.records.iter().filter(|r| r.rank.is_some())
    }
}

/// Runs all trials in parallel; the output depends only on `cfg`, not on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let run = || -> Vec<MeasureRecord> {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(&trial_input(cfg, t), t, cfg))
            .collect()
    };
    let records = match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(rank_records(records))
}

/// Sorts by trial id, then assigns ranks by ascending divergence (ties by trial id)
/// to non-degenerate, non-failed records.
pub fn rank_records(mut records: Vec<MeasureRecord>) -> ExperimentOutcome {
    records.sort_by_key(|r| r.trial_id);
    let mut order: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].is_ranked_candidate())
        .collect();
    order.sort_by(|&i, &j| {
        records[i]
            .divergence
            .total_cmp(&records[j].divergence)
            .then(records[i].trial_id.cmp(&records[j].trial_id))
    });
    for r in records.iter_mut() {
        r.rank = None;
    }
    for (k, &i) in order.iter().enumerate() {
        records[i].rank = Some(k);
    }
    let failures = records.iter().filter(|r| r.failed).count();
    let degenerate = records.iter().filter(|r| r.degenerate).count();
    records.sort_by(|a, b| match (a.rank, b.rank) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.trial_id.cmp(&b.trial_id),
    });
    ExperimentOutcome {
        records,
        failures,
        degenerate,
    }
}
