use std::path::Path;

use anyhow::Result;
use maass_core::hejhal::Symmetry;
use maass_core::number_theory::{
    coefficient_bound_check, hecke_residuals, ramanujan_check, sato_tate_distance, PrimeCoefficientSet,
};
use maass_core::search::Gates;
use maass_core::statistics::ks_critical_5;
use serde::Serialize;

use super::{stem, CoefficientFile, Kind};
use crate::config::RunConfig;
use crate::format::to_json;
use crate::io::write_output;
use crate::Outcome;

#[derive(Debug, Clone, Serialize)]
pub struct HeckeSummary {
    pub max_residual: f64,
    /// `(m, p, mp)` of the worst relation.
    pub worst_triple: [usize; 3],
    pub checked: usize,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RamanujanSummary {
    pub max_abs: f64,
    /// Primes with `|a_p| > 2` beyond the slack.
    pub violations: Vec<usize>,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSummary {
    /// Largest `|a_n| / (d(n) n^{1/4})`.
    pub worst_ratio: f64,
    pub worst_n: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SatoTateSummary {
    pub primes: usize,
    pub ks: Option<f64>,
    pub ks_critical: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub source: String,
    pub kind: Kind,
    pub r: f64,
    pub symmetry: Symmetry,
    pub coefficients: usize,
    pub hecke: HeckeSummary,
    pub ramanujan: RamanujanSummary,
    pub bound: BoundSummary,
    pub sato_tate: SatoTateSummary,
    pub passed: bool,
}

pub fn summarize(source: &str, file: &CoefficientFile, gates: &Gates) -> VerifySummary {
    let a = &file.coefficients;
    let h = hecke_residuals(a);
    let hecke = HeckeSummary {
        max_residual: h.max_residual,
        worst_triple: [h.worst_triple.0, h.worst_triple.1, h.worst_triple.2],
        checked: h.checked_count,
        threshold: gates.hecke,
        passed: h.max_residual <= gates.hecke,
    };
    let ram = ramanujan_check(a);
    let violations: Vec<usize> =
        ram.violations.iter().filter(|v| v.1.abs() > 2.0 + gates.ramanujan_slack).map(|v| v.0).collect();
    let ramanujan = RamanujanSummary {
        max_abs: ram.max_abs,
        passed: violations.is_empty(),
        violations,
        note: (file.kind == Kind::Eisenstein)
            .then(|| "holds trivially for Eisenstein series: a_p = 2cos(r log p)".to_string()),
    };
    let b = coefficient_bound_check(a);
    let bound = BoundSummary { worst_ratio: b.worst_ratio, worst_n: b.worst_n, passed: b.worst_ratio <= gates.bound_ratio };
    let primes = PrimeCoefficientSet::from_coefficients(a);
    let n_primes = primes.values().len();
    let sato_tate = SatoTateSummary {
        primes: n_primes,
        ks: sato_tate_distance(&primes).ok(),
        ks_critical: (n_primes > 0).then(|| ks_critical_5(n_primes as f64)),
    };
    let passed = hecke.passed && ramanujan.passed && bound.passed;
    VerifySummary {
        source: source.to_string(),
        kind: file.kind,
        r: file.r,
        symmetry: file.symmetry,
        coefficients: a.len(),
        hecke,
        ramanujan,
        bound,
        sato_tate,
        passed,
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print(s: &VerifySummary) {
    println!("record     {} ({:?}, {} coefficients)", s.source, s.kind, s.coefficients);
    println!("r          {:.12} {}", s.r, s.symmetry);
    let [m, p, mp] = s.hecke.worst_triple;
    println!(
        "hecke      max residual {:.3e} over {} relations, worst a_{m}a_{p} vs a_{mp}  {}",
        s.hecke.max_residual,
        s.hecke.checked,
        mark(s.hecke.passed)
    );
    println!(
        "ramanujan  max |a_p| {:.6}, {} violation(s) {:?}  {}",
        s.ramanujan.max_abs,
        s.ramanujan.violations.len(),
        s.ramanujan.violations,
        mark(s.ramanujan.passed)
    );
    if let Some(note) = &s.ramanujan.note {
        println!("           {note}");
    }
    println!(
        "bound      max |a_n|/(d(n) n^1/4) {:.6} at n={}  {}",
        s.bound.worst_ratio,
        s.bound.worst_n,
        mark(s.bound.passed)
    );
    match (s.sato_tate.ks, s.sato_tate.ks_critical) {
        (Some(ks), Some(c)) => {
            println!("sato-tate  KS {ks:.4} over {} primes (5% critical value {c:.4})", s.sato_tate.primes)
        }
        _ => println!("sato-tate  no prime coefficients"),
    }
    println!("result     {}", mark(s.passed));
}

pub fn run(cfg: &RunConfig, record: &Path, overwrite: bool) -> Result<Outcome> {
    let file = CoefficientFile::read(record)?;
    let summary = summarize(&record.display().to_string(), &file, &Gates::default());
    print(&summary);
    let out = cfg.output_dir.join(format!("{}.verify.json", stem(record)));
    write_output(&out, &to_json(&summary)?, overwrite)?;
    Ok(if summary.passed { Outcome::Success } else { Outcome::ChecksFailed })
}
