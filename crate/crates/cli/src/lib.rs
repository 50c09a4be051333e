//! Command implementations behind the `numrad` binary.

pub mod matrix_file;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use numrad::ando::{
    ando_from_representor, canonical_representor, multiplicity, pencil_singularity, property_measures,
};
use numrad::certificate::{is_strongly_certified, Thresholds};
use numrad::experiment::{
    covanishing_report, emit_report, read_csv, run_experiment, write_svg, ExperimentConfig, ReportFormat,
};
use numrad::radius::{divergence, is_identity_multiple, radius_boundary, ScanConfig};
use numrad::sdp::{
    solve_prox_sdp, solve_radius_sdp, verify_prox_optimality, SdpOptions, DEFAULT_CLUSTER_TOL,
};
use numrad::{ComplexMatrix, HermitianMatrix};

pub use matrix_file::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Core(#[from] numrad::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 3 parse, 4 solver, 5 I/O, 6 degenerate input, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use numrad::Error as E;
        match self {
            CliError::Parse { .. } => 3,
            CliError::Io { .. } => 5,
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::Solver(_) | E::NoConvergence { .. } | E::Factorization { .. } => 4,
                E::Io { .. } | E::Csv { .. } => 5,
                E::Degenerate(_) => 6,
                E::InvalidConfig(_) => 2,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "numrad", version, about = "Numerical radius, its prox, and disk-matrix certification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sdp,
    Boundary,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical radius of a matrix file.
    Radius {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Prox of the numerical radius; writes the result and its representor.
    Prox {
        path: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Output file for the prox point.
        #[arg(long, default_value = "prox_a.txt")]
        out_a: PathBuf,
        /// Output file for its representor.
        #[arg(long, default_value = "prox_z.txt")]
        out_z: PathBuf,
    },
    /// Disk-matrix verdict with the underlying measures.
    Certify {
        path: PathBuf,
        /// Write the certificate coefficients (column j holds the w^j coefficients).
        #[arg(long)]
        coefficients: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7)]
        disk_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        sep_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        span_tol: f64,
    },
    /// Ando factors, pencil test and property measures from a representor.
    Ando {
        path: PathBuf,
        /// Representor to factor; solved for when omitted.
        #[arg(long)]
        representor: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Random prox experiment; writes records.csv and measures.svg per order.
    Experiment {
        /// Comma-separated matrix orders.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0.75)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        accept_tol: f64,
        #[arg(long, default_value_t = 1e-7)]
        disk_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        sep_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        span_tol: f64,
        #[arg(long, default_value_t = 1e-5)]
        band_low: f64,
        #[arg(long, default_value_t = 1e-3)]
        band_high: f64,
        #[arg(long, default_value = "numrad-out")]
        out: PathBuf,
        #[arg(long)]
        no_svg: bool,
    },
    /// Co-vanishing summary and plot for an existing records CSV.
    Report {
        csv: PathBuf,
        /// Plot destination; defaults to measures.svg beside the CSV.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-5)]
        band_low: f64,
        #[arg(long, default_value_t = 1e-3)]
        band_high: f64,
    },
}

fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    matrix_file::parse(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_matrix(path: &Path, m: &ComplexMatrix) -> CliResult<()> {
    fs::write(path, matrix_file::render(m)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn out_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn tol_opts(tol: f64) -> CliResult<SdpOptions> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(SdpOptions::with_tol(tol))
}

/// Runs a command, writing human-readable output to `out`.
pub fn run(cli: Cli, threads: Option<usize>, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Radius { path, method, tol } => cmd_radius(&path, method, tol, out),
        Command::Prox {
            path,
            lambda,
            tol,
            out_a,
            out_z,
        } => cmd_prox(&path, lambda, tol, &out_a, &out_z, out),
        Command::Certify {
            path,
            coefficients,
            disk_tol,
            sep_tol,
            span_tol,
        } => {
            let th = Thresholds {
                disk: disk_tol,
                separation: sep_tol,
                spanning: span_tol,
            };
            cmd_certify(&path, coefficients.as_deref(), &th, out)
        }
        Command::Ando {
            path,
            representor,
            tol,
        } => cmd_ando(&path, representor.as_deref(), tol, out),
        Command::Experiment {
            n,
            trials,
            lambda,
            seed,
            tol,
            accept_tol,
            disk_tol,
            sep_tol,
            span_tol,
            band_low,
            band_high,
            out: dir,
            no_svg,
        } => {
            let base = ExperimentConfig {
                n: 0,
                trials,
                lambda,
                seed,
                thresholds: Thresholds {
                    disk: disk_tol,
                    separation: sep_tol,
                    spanning: span_tol,
                },
                solver_tol: tol,
                solver_accept_tol: accept_tol,
                band: (band_low, band_high),
                output_dir: Some(dir),
                threads,
            };
            cmd_experiment(&n, &base, !no_svg, out)
        }
        Command::Report {
            csv,
            svg,
            band_low,
            band_high,
        } => cmd_report(&csv, svg.as_deref(), (band_low, band_high), out),
    }
}

pub fn cmd_radius(path: &Path, method: Method, tol: f64, out: &mut dyn Write) -> CliResult<()> {
    let a = read_matrix(path)?;
    let opts = tol_opts(tol)?;
    let boundary = match method {
        Method::Boundary | Method::Both => Some(radius_boundary(&a, &ScanConfig::default())?.radius),
        Method::Sdp => None,
    };
    let sdp = match method {
        Method::Sdp | Method::Both => Some(solve_radius_sdp(&a, &opts)?),
        Method::Boundary => None,
    };
    match (boundary, &sdp) {
        (Some(rb), Some(rep)) => {
            writeln!(out, "radius {rb:.15}").map_err(out_err)?;
            writeln!(out, "sdp radius {:.15}", rep.radius).map_err(out_err)?;
            writeln!(out, "discrepancy {:.3e}", (rep.radius - rb).abs()).map_err(out_err)?;
        }
        (Some(rb), None) => writeln!(out, "radius {rb:.15}").map_err(out_err)?,
        (None, Some(rep)) => writeln!(out, "radius {:.15}", rep.radius).map_err(out_err)?,
        (None, None) => unreachable!(),
    }
    if let Some(rep) = sdp {
        writeln!(
            out,
            "top multiplicity {}\nduality gap {:.3e}\nrepresentor",
            rep.top_multiplicity, rep.stats.duality_gap
        )
        .map_err(out_err)?;
        write!(out, "{}", matrix_file::render(rep.z.as_matrix())).map_err(out_err)?;
    }
    Ok(())
}

pub fn cmd_prox(
    path: &Path,
    lambda: f64,
    tol: f64,
    out_a: &Path,
    out_z: &Path,
    out: &mut dyn Write,
) -> CliResult<()> {
    let y = read_matrix(path)?;
    let prox = solve_prox_sdp(&y, lambda, &tol_opts(tol)?)?;
    write_matrix(out_a, &prox.a)?;
    write_matrix(out_z, prox.rep.z.as_matrix())?;
    let report = verify_prox_optimality(&y, &prox.a, lambda, &prox.rep)?;
    writeln!(out, "radius {:.15}", prox.rep.radius).map_err(out_err)?;
    writeln!(out, "objective {:.15}", prox.rep.stats.objective).map_err(out_err)?;
    writeln!(out, "duality gap {:.3e}", prox.rep.stats.duality_gap).map_err(out_err)?;
    writeln!(
        out,
        "optimality: reference violation {:.3e}, directional violation {:.3e}",
        report.reference_violation, report.directional_violation
    )
    .map_err(out_err)?;
    writeln!(out, "wrote {} and {}", out_a.display(), out_z.display()).map_err(out_err)?;
    Ok(())
}

/// Verdict of `certify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    StronglyCertifiedDisk,
    Disk,
    NonDisk,
    IdentityMultiple,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::StronglyCertifiedDisk => "strongly-certified-disk",
            Verdict::Disk => "disk",
            Verdict::NonDisk => "non-disk",
            Verdict::IdentityMultiple => "identity-multiple",
        }
    }
}

pub fn cmd_certify(
    path: &Path,
    coefficients: Option<&Path>,
    th: &Thresholds,
    out: &mut dyn Write,
) -> CliResult<()> {
    let a = read_matrix(path)?;
    if a.max_abs() == 0.0 {
        return Err(numrad::Error::Degenerate("the zero matrix has no disk structure to certify".into()).into());
    }
    let scan = ScanConfig::default();
    let r = radius_boundary(&a, &scan)?.radius;
    let div = divergence(&a, r, &scan)?;
    let rep = is_strongly_certified(&a, r, th)?;
    let verdict = if is_identity_multiple(&a) {
        Verdict::IdentityMultiple
    } else if rep.strongly_certified {
        Verdict::StronglyCertifiedDisk
    } else if rep.certificate.is_some() {
        Verdict::Disk
    } else {
        Verdict::NonDisk
    };
    writeln!(out, "radius {r:.15}").map_err(out_err)?;
    writeln!(out, "divergence {div:.6e}").map_err(out_err)?;
    writeln!(out, "delta_defect {:.6e}", rep.disk_defect).map_err(out_err)?;
    writeln!(out, "separation {:.6e}", rep.separation).map_err(out_err)?;
    writeln!(out, "spanning_cond {:.6e}", rep.spanning_cond).map_err(out_err)?;
    if let Some(c) = &rep.certificate {
        writeln!(out, "certificate null space dimension {}", c.null_dim).map_err(out_err)?;
    }
    writeln!(out, "verdict {}", verdict.label()).map_err(out_err)?;
    if let Some(p) = coefficients {
        let Some(c) = &rep.certificate else {
            return Err(numrad::Error::InvalidCertificate(format!(
                "no disk certificate to write to {}",
                p.display()
            ))
            .into());
        };
        write_matrix(p, &c.coeffs)?;
    }
    Ok(())
}

pub fn cmd_ando(path: &Path, representor: Option<&Path>, tol: f64, out: &mut dyn Write) -> CliResult<()> {
    let a = read_matrix(path)?;
    if a.max_abs() == 0.0 {
        return Err(numrad::Error::Degenerate("the zero matrix has no Ando factorization".into()).into());
    }
    let (z, r) = match representor {
        Some(p) => {
            let z = HermitianMatrix::hermitian_part(&read_matrix(p)?);
            let r = numrad::linalg::lambda_max(&numrad::sdp::build_phi(&a, &z)?)?;
            (z, r)
        }
        None => {
            let rep = solve_radius_sdp(&a, &tol_opts(tol)?)?;
            (rep.z, rep.radius)
        }
    };
    let n = a.rows();
    let m = property_measures(&a, &z, r)?;
    let mult = multiplicity(&a, &z, r, DEFAULT_CLUSTER_TOL)?;
    writeln!(out, "radius {r:.15}").map_err(out_err)?;
    writeln!(out, "representor").map_err(out_err)?;
    write!(out, "{}", matrix_file::render(z.as_matrix())).map_err(out_err)?;
    writeln!(
        out,
        "measures m1 {:.6e} m2 {:.6e} m3 {:.6e} m4 {:.6e} m5 {:.6e}",
        m.m1, m.m2, m.m3, m.m4, m.m5
    )
    .map_err(out_err)?;
    writeln!(out, "multiplicity {mult} (order {n}, property holds: {})", mult > n).map_err(out_err)?;

    let f = ando_from_representor(&a, &z, r)?;
    for (name, mat) in [("S", f.s.as_matrix()), ("U", &f.u), ("C", f.c.as_matrix())] {
        writeln!(out, "{name}").map_err(out_err)?;
        write!(out, "{}", matrix_file::render(mat)).map_err(out_err)?;
    }
    writeln!(
        out,
        "reconstruction residual {:.3e}\nunitarity residual {:.3e}",
        f.reconstruction_residual, f.unitarity_residual
    )
    .map_err(out_err)?;
    let pencil = pencil_singularity(&f.u, &f.c, &f.s)?;
    writeln!(
        out,
        "pencil max sigma_min {:.3e}, sigma_min(S) {:.3e}",
        pencil.max_sigma_min, pencil.sigma_min_s
    )
    .map_err(out_err)?;
    let canon = canonical_representor(&f.s)?;
    let canon_r = r * numrad::linalg::lambda_max(&numrad::sdp::build_phi(&a.scale(1.0 / r), &canon)?)?;
    let canon_mult = multiplicity(&a, &canon.scale(r), r, DEFAULT_CLUSTER_TOL)?;
    writeln!(out, "canonical representor (unit radius)").map_err(out_err)?;
    write!(out, "{}", matrix_file::render(canon.as_matrix())).map_err(out_err)?;
    writeln!(out, "canonical lambda_max {canon_r:.15}, multiplicity {canon_mult}").map_err(out_err)?;
    Ok(())
}

pub fn cmd_experiment(ns: &[usize], base: &ExperimentConfig, svg: bool, out: &mut dyn Write) -> CliResult<()> {
    let root = base.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    for &n in ns {
        let dir = root.join(format!("n{n}"));
        let cfg = ExperimentConfig {
            n,
            output_dir: Some(dir.clone()),
            ..base.clone()
        };
        let outcome = run_experiment(&cfg)?;
        let files = emit_report(&outcome.records, &dir, ReportFormat { csv: true, svg })?;
        let s = covanishing_report(&outcome.records, cfg.band.0, cfg.band.1);
        writeln!(
            out,
            "n={n} trials={} disk={} strongly_certified={} non_disk={} degenerate={} failed={} \
             agreement={}/{} ({:.4}) band={}",
            cfg.trials,
            s.disk_records,
            s.strongly_certified_disk,
            outcome.ranked().count() - s.disk_records,
            outcome.degenerate,
            outcome.failures,
            s.agreeing,
            s.considered,
            s.agreement_fraction,
            s.band_population
        )
        .map_err(out_err)?;
        for f in files {
            writeln!(out, "wrote {}", f.display()).map_err(out_err)?;
        }
    }
    Ok(())
}

pub fn cmd_report(csv: &Path, svg: Option<&Path>, band: (f64, f64), out: &mut dyn Write) -> CliResult<()> {
    let file = fs::File::open(csv).map_err(|source| CliError::Io {
        path: csv.to_path_buf(),
        source,
    })?;
    let records = read_csv(file, csv)?;
    let s = covanishing_report(&records, band.0, band.1);
    writeln!(
        out,
        "records={} disk={} strongly_certified={} identity_multiples={} agreement={}/{} ({:.4}) band={}",
        records.len(),
        s.disk_records,
        s.strongly_certified_disk,
        s.identity_multiples,
        s.agreeing,
        s.considered,
        s.agreement_fraction,
        s.band_population
    )
    .map_err(out_err)?;
    let svg_path = svg
        .map(Path::to_path_buf)
        .unwrap_or_else(|| csv.with_file_name("measures.svg"));
    let io = |source| CliError::Io {
        path: svg_path.clone(),
        source,
    };
    let mut w = std::io::BufWriter::new(fs::File::create(&svg_path).map_err(io)?);
    write_svg(&records, &mut w, &svg_path)?;
    w.flush().map_err(io)?;
    writeln!(out, "wrote {}", svg_path.display()).map_err(out_err)?;
    Ok(())
}
