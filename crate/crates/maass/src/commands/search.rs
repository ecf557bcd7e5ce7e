use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use maass_core::hejhal::Symmetry;
use maass_core::search::{
    next_step, search_interval, Bracket, EigenvalueRecord, GridPoint, RejectedBracket, SearchConfig, SearchObserver,
};

use crate::config::RunConfig;
use crate::format::{csv, f17, to_json};
use crate::io::write_output;
use crate::{Outcome, UsageError};

/// `odd_9.533695261354` style name shared by the JSON record and its CSV.
pub fn record_stem(symmetry: Symmetry, r: f64) -> String {
    format!("{symmetry}_{r:.12}")
}

pub fn log_path(dir: &Path, symmetry: Symmetry) -> PathBuf {
    dir.join(format!("search-{symmetry}.log"))
}

fn log_header(symmetry: Symmetry, r_min: f64, r_max: f64, cfg: &RunConfig) -> String {
    format!(
        "# maass search symmetry={symmetry} r_min={} r_max={} eps={} r_tol={}",
        f17(r_min),
        f17(r_max),
        f17(cfg.eps),
        f17(cfg.r_tol)
    )
}

const COLUMNS: &str = "# r,step,distance,sign_changes,m0";

/// Last grid point of a log: `(r, step, distance)`.
fn last_point(path: &Path, header: &str) -> Result<Option<(f64, f64, Option<f64>)>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut lines = BufReader::new(f).lines();
    let first = lines.next().transpose()?.unwrap_or_default();
    if first != header {
        return Err(UsageError(format!(
            "{} was written with different settings ({first}); cannot resume with {header}",
            path.display()
        ))
        .into());
    }
    let mut last = None;
    for line in lines {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parsed = (|| -> Option<(f64, f64, Option<f64>)> {
            let r = cells.first()?.parse().ok()?;
            let step = cells.get(1)?.parse().ok()?;
            let d = match *cells.get(2)? {
                "" => None,
                s => Some(s.parse().ok()?),
            };
            Some((r, step, d))
        })();
        // a torn final line from an interrupted run is skipped
        if let Some(p) = parsed {
            last = Some(p);
        }
    }
    Ok(last)
}

/// Appends to the progress log and writes each accepted record as it arrives.
struct Progress {
    log: File,
    dir: PathBuf,
    overwrite: bool,
    written: Vec<PathBuf>,
    error: Option<anyhow::Error>,
}

impl Progress {
    fn line(&mut self, s: &str) {
        if self.error.is_none() {
            if let Err(e) = writeln!(self.log, "{s}").and_then(|_| self.log.flush()) {
                self.error = Some(anyhow::Error::new(e).context("writing progress log"));
            }
        }
    }

    fn save(&mut self, record: &EigenvalueRecord) -> Result<()> {
        let stem = record_stem(record.symmetry, record.r);
        let json = self.dir.join(format!("{stem}.json"));
        write_output(&json, &to_json(record)?, self.overwrite)?;
        let rows = record.coefficients.iter().enumerate().map(|(i, a)| vec![(i + 1).to_string(), f17(*a)]);
        let coeffs = self.dir.join(format!("{stem}.coefficients.csv"));
        write_output(&coeffs, csv(&["index", "value"], rows).as_bytes(), self.overwrite)?;
        self.written.push(json);
        Ok(())
    }
}

impl SearchObserver for Progress {
    fn grid_point(&mut self, p: &GridPoint) {
        let d = p.distance.map(f17).unwrap_or_default();
        self.line(&format!("{},{},{d},{},{}", f17(p.r), f17(p.step), p.sign_changes, p.m0));
    }

    fn bracket(&mut self, b: &Bracket) {
        self.line(&format!("# bracket [{}, {}] sign_changes={}", f17(b.r_lo), f17(b.r_hi), b.sign_changes));
    }

    fn accepted(&mut self, record: &EigenvalueRecord) {
        if self.error.is_none() {
            if let Err(e) = self.save(record) {
                self.error = Some(e);
            }
        }
        self.line(&format!("# accepted r={} hecke={:e}", f17(record.r), record.hecke_max_residual));
        eprintln!("  {} eigenvalue r = {:.12}", record.symmetry, record.r);
    }

    fn rejected(&mut self, rej: &RejectedBracket) {
        self.line(&format!("# rejected [{}, {}]: {}", f17(rej.r_lo), f17(rej.r_hi), rej.reason));
    }
}

pub fn run(cfg: &RunConfig, overwrite: bool, resume: bool) -> Result<Outcome> {
    let (r_min, r_max) = cfg.search_range()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let hejhal = super::solver(cfg)?;
    for symmetry in cfg.symmetry.symmetries() {
        let path = log_path(dir, symmetry);
        let header = log_header(symmetry, r_min, r_max, cfg);
        let mut start = r_min;
        let mut initial_step = cfg.initial_step;
        let log = if path.exists() && resume {
            if let Some((r, step, d)) = last_point(&path, &header)? {
                start = r;
                if step > 0.0 {
                    initial_step = Some(next_step(step, d));
                }
            }
            OpenOptions::new().append(true).open(&path)?
        } else if path.exists() && !overwrite {
            return Err(UsageError(format!(
                "{} exists; pass --resume to continue it or --overwrite to start again",
                path.display()
            ))
            .into());
        } else {
            let mut f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            writeln!(f, "{header}\n{COLUMNS}")?;
            f
        };
        if start >= r_max {
            eprintln!("{symmetry}: log already reaches r_max, nothing to do");
            continue;
        }
        eprintln!("{symmetry}: searching [{start}, {r_max}]");
        let config = SearchConfig { eps: cfg.eps, r_tol: cfg.r_tol, initial_step, ..SearchConfig::default() };
        let mut progress = Progress { log, dir: dir.clone(), overwrite, written: Vec::new(), error: None };
        let report = search_interval(&hejhal, start, r_max, symmetry, &config, &mut progress)
            .with_context(|| format!("{symmetry} search on [{start}, {r_max}]"))?;
        if let Some(e) = progress.error {
            return Err(e);
        }
        eprintln!(
            "{symmetry}: {} eigenvalue(s), {} rejected bracket(s), {} solves",
            report.eigenvalues.len(),
            report.rejected_brackets.len(),
            report.grid_points_used
        );
        for p in &progress.written {
            println!("{}", p.display());
        }
    }
    Ok(Outcome::Success)
}
