//! CSV and SVG output for experiment records, and the co-vanishing analysis.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::MeasureRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 18] = [
    "trial_id",
    "n",
    "rank",
    "radius",
    "divergence",
    "delta_defect",
    "m1",
    "m2",
    "m3",
    "m5",
    "separation",
    "spanning_cond",
    "solver_gap",
    "identity_multiple",
    "classified_disk",
    "strongly_certified",
    "degenerate",
    "failed",
];

/// Values at or below this are drawn on the bottom edge of the plot.
const LOG_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportFormat {
    pub csv: bool,
    pub svg: bool,
}

impl Default for ReportFormat {
    fn default() -> Self {
        Self { csv: true, svg: true }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the header and one row per record, in the given order.
pub fn write_csv<W: Write>(records: &[MeasureRecord], out: W, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err(path))?;
    for r in records {
        let row = [
            r.trial_id.to_string(),
            r.n.to_string(),
            r.rank.map(|k| k.to_string()).unwrap_or_default(),
            num(r.radius),
            num(r.divergence),
            num(r.delta_defect),
            num(r.m1),
            num(r.m2),
            num(r.m3),
            num(r.m5),
            num(r.separation),
            num(r.spanning_cond),
            num(r.solver_gap),
            r.identity_multiple.to_string(),
            r.classified_disk.to_string(),
            r.strongly_certified.to_string(),
            r.degenerate.to_string(),
            r.failed.to_string(),
        ];
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses records written by [`write_csv`]. The seed is not stored and reads back as 0.
pub fn read_csv<R: Read>(input: R, path: &Path) -> Result<Vec<MeasureRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidConfig(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (line, row) in rd.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let bad = |col: usize| {
            Error::InvalidConfig(format!(
                "{}: row {}: cannot parse column {} ({:?})",
                path.display(),
                line + 2,
                CSV_HEADER[col],
                &row[col]
            ))
        };
        let f = |col: usize| row[col].parse::<f64>().map_err(|_| bad(col));
        let b = |col: usize| row[col].parse::<bool>().map_err(|_| bad(col));
        out.push(MeasureRecord {
            trial_id: row[0].parse().map_err(|_| bad(0))?,
            n: row[1].parse().map_err(|_| bad(1))?,
            seed: 0,
            rank: match &row[2] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(2))?),
            },
            radius: f(3)?,
            divergence: f(4)?,
            delta_defect: f(5)?,
            m1: f(6)?,
            m2: f(7)?,
            m3: f(8)?,
            m5: f(9)?,
            separation: f(10)?,
            spanning_cond: f(11)?,
            solver_gap: f(12)?,
            identity_multiple: b(13)?,
            classified_disk: b(14)?,
            strongly_certified: b(15)?,
            degenerate: b(16)?,
            failed: b(17)?,
            failure: None,
        });
    }
    Ok(out)
}

const PANELS: [&str; 7] = [
    "divergence",
    "sigma_min(Delta)",
    "sigma_min(A)",
    "sigma_(n-1)(A^2)",
    "representor extremity",
    "multiplicity gap",
    "separation / spanning",
];

/// Seven stacked panels sharing the rank axis, `log10` scale clipped at `1e-16`.
pub fn write_svg<W: Write>(records: &[MeasureRecord], mut out: W, path: &Path) -> Result<()> {
    let mut ranked: Vec<&MeasureRecord> = records.iter().filter(|r| r.rank.is_some()).collect();
    ranked.sort_by_key(|r| r.rank);
    let (width, panel_h, left, right, top) = (900.0, 140.0, 70.0, 20.0, 20.0);
    let height = top + panel_h * PANELS.len() as f64 + 30.0;
    let plot_w = width - left - right;
    let (y_lo, y_hi) = (LOG_FLOOR.log10(), 1.0);
    let count = ranked.len().max(2) as f64 - 1.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (p, title) in PANELS.iter().enumerate() {
        let y0 = top + p as f64 * panel_h;
        let inner_top = y0 + 14.0;
        let inner_h = panel_h - 28.0;
        let ypos = |v: f64| {
            let l = v.max(LOG_FLOOR).log10().clamp(y_lo, y_hi);
            inner_top + (y_hi - l) / (y_hi - y_lo) * inner_h
        };
        let _ = writeln!(
            s,
            r##"<rect x="{left}" y="{inner_top}" width="{plot_w}" height="{inner_h}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(s, r#"<text x="{left}" y="{}">{title}</text>"#, y0 + 10.0);
        for tick in [0.0, -8.0, -16.0] {
            let ty = ypos(10f64.powf(tick));
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">1e{tick}</text>"#,
                left - 4.0,
                ty + 4.0
            );
        }
        let series: Vec<(Box<dyn Fn(&MeasureRecord) -> f64>, &str)> = match p {
            0 => vec![(Box::new(|r| r.divergence), "#1f77b4")],
            1 => vec![(Box::new(|r| r.delta_defect), "#1f77b4")],
            2 => vec![(Box::new(|r| r.m1), "#1f77b4")],
            3 => vec![(Box::new(|r| r.m2), "#1f77b4")],
            4 => vec![(Box::new(|r| r.m3), "#1f77b4")],
            5 => vec![(Box::new(|r| r.m5), "#1f77b4")],
            _ => vec![
                (Box::new(|r| r.separation), "#d62728"),
                (Box::new(|r| r.spanning_cond), "#2ca02c"),
            ],
        };
        for (value, color) in &series {
            for (k, r) in ranked.iter().enumerate() {
                let v = value(r);
                if v.is_nan() {
                    continue;
                }
                let x = left + k as f64 / count * plot_w;
                let _ = writeln!(
                    s,
                    r#"<circle cx="{x:.2}" cy="{:.2}" r="1.6" fill="{color}"/>"#,
                    ypos(v)
                );
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">rank by divergence</text>"#,
        left + plot_w / 2.0,
        height - 8.0
    );
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `records.csv` and/or `measures.svg` into `dir`, creating it if needed.
pub fn emit_report(records: &[MeasureRecord], dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    if format.csv {
        let path = dir.join("records.csv");
        let file = File::create(&path).map_err(io(&path))?;
        write_csv(records, BufWriter::new(file), &path)?;
        written.push(path);
    }
    if format.svg {
        let path = dir.join("measures.svg");
        let file = File::create(&path).map_err(io(&path))?;
        let mut w = BufWriter::new(file);
        write_svg(records, &mut w, &path)?;
        w.flush().map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovanishingSummary {
    /// Records with every indicator outside the ambiguity band.
    pub considered: usize,
    /// Considered records whose six indicators all agree.
    pub agreeing: usize,
    /// Ranked records with at least one measure inside the band.
    pub band_population: usize,
    pub agreement_fraction: f64,
    pub disk_records: usize,
    /// Disk records that also pass the separation and spanning conditions.
    pub strongly_certified_disk: usize,
    pub identity_multiples: usize,
}

/// Checks that divergence and m1..m5 vanish together: each measure counts as
/// vanishing at or below `low` and as nonzero at or above `high`.
pub fn covanishing_report(records: &[MeasureRecord], low: f64, high: f64) -> CovanishingSummary {
    let mut s = CovanishingSummary {
        considered: 0,
        agreeing: 0,
        band_population: 0,
        agreement_fraction: 1.0,
        disk_records: 0,
        strongly_certified_disk: 0,
        identity_multiples: 0,
    };
    for r in records.iter().filter(|r| r.is_ranked_candidate()) {
        if r.identity_multiple {
            s.identity_multiples += 1;
        }
        if r.classified_disk {
            s.disk_records += 1;
            if r.strongly_certified {
                s.strongly_certified_disk += 1;
            }
        }
        let flags: Option<Vec<bool>> = r
            .measures()
            .iter()
            .map(|&m| {
                if m <= low {
                    Some(true)
                } else if m >= high {
                    Some(false)
                } else {
                    None
                }
            })
            .collect();
        match flags {
            None => s.band_population += 1,
            Some(f) => {
                s.considered += 1;
                if f.iter().all(|&x| x == f[0]) {
                    s.agreeing += 1;
                }
            }
        }
    }
    if s.considered > 0 {
        s.agreement_fraction = s.agreeing as f64 / s.considered as f64;
    }
    s
}
