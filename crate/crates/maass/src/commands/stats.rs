use std::path::Path;

use anyhow::Result;
use maass_core::hejhal::{CoefficientVector, Symmetry};
use maass_core::number_theory::{
    sato_tate_distance, semicircle_cdf, semicircle_density, PrimeCoefficientSet,
};
use maass_core::statistics::{gaussian_cdf, gaussian_density, histogram_range, hyperbolic_area, value_distribution, Region};
use serde::Serialize;

use super::{stem, CoefficientFile, Kind};
use crate::config::{RegionChoice, RunConfig};
use crate::format::{csv, f17, to_json};
use crate::io::write_output;
use crate::{Outcome, UsageError};

/// Weighted empirical CDF at each distinct value: `(u, F(u))`, ascending.
pub fn weighted_cdf(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let total: f64 = weights.iter().sum();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for i in idx {
        acc += weights[i];
        match out.last_mut() {
            Some(last) if last.0 == values[i] => last.1 = acc / total,
            _ => out.push((values[i], acc / total)),
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct StatsMeta<'a> {
    source: String,
    r: f64,
    symmetry: Symmetry,
    region_choice: &'a str,
    region: Region,
    hyperbolic_area: f64,
    grid_n: usize,
    samples: usize,
    /// Waveform values carry the factor `e^{πr/2}`.
    normalization: &'a str,
    sigma2: f64,
    mean: f64,
    ks_to_gaussian: f64,
    ks_critical: f64,
    passes_ks: bool,
    sato_tate_primes: usize,
    sato_tate_ks: Option<f64>,
    files: Vec<String>,
}

pub fn run(cfg: &RunConfig, record: &Path, overwrite: bool) -> Result<Outcome> {
    let file = CoefficientFile::read(record)?;
    if file.kind != Kind::Cusp {
        return Err(UsageError(format!("{}: stats needs a cusp form, not {:?} coefficients", record.display(), file.kind)).into());
    }
    let region = cfg.region.region_for(file.r)?;
    let hejhal = super::solver(cfg)?;
    let coeffs = CoefficientVector::new(file.symmetry, file.r, file.coefficients.clone());
    let dist = value_distribution(&hejhal, &coeffs, &region, cfg.grid_n)?;
    let sigma = dist.sigma2.sqrt();

    let mut outputs: Vec<(String, String)> = Vec::new();
    let h = &dist.histogram;
    let rows = (0..h.masses.len()).map(|i| {
        let u = h.center(i);
        let g = if sigma > 0.0 { gaussian_density(u, sigma) } else { 0.0 };
        vec![f17(u), f17(h.density(i)), f17(g)]
    });
    outputs.push(("value_histogram.csv".into(), csv(&["bin_center", "empirical_density", "gaussian_density"], rows)));

    let values: Vec<f64> = dist.samples.iter().map(|s| s.f).collect();
    let weights: Vec<f64> = dist.samples.iter().map(|s| s.weight).collect();
    let rows = weighted_cdf(&values, &weights).into_iter().map(|(u, f)| {
        let g = if sigma > 0.0 { gaussian_cdf(u, sigma).unwrap_or(f64::NAN) } else { f64::NAN };
        vec![f17(u), f17(f), f17(g)]
    });
    outputs.push(("value_cdf.csv".into(), csv(&["value", "empirical_cdf", "gaussian_cdf"], rows)));

    let rows = dist.samples.iter().map(|s| vec![f17(s.x), f17(s.y), f17(s.f)]);
    outputs.push(("waveform_grid.csv".into(), csv(&["x", "y", "f"], rows)));

    let primes = PrimeCoefficientSet::from_coefficients(&file.coefficients);
    let ap = primes.values();
    if !ap.is_empty() {
        let ones = vec![1.0; ap.len()];
        let bins = ((ap.len() as f64).sqrt().ceil() as usize).max(4);
        let st = histogram_range(&ap, &ones, -2.0, 2.0, bins)?;
        let rows = (0..bins).map(|i| vec![f17(st.center(i)), f17(st.density(i)), f17(semicircle_density(st.center(i)))]);
        outputs.push((
            "sato_tate_histogram.csv".into(),
            csv(&["bin_center", "empirical_density", "semicircle_density"], rows),
        ));
        let rows = weighted_cdf(&ap, &ones).into_iter().map(|(u, f)| vec![f17(u), f17(f), f17(semicircle_cdf(u))]);
        outputs.push(("sato_tate_cdf.csv".into(), csv(&["a_p", "empirical_cdf", "semicircle_cdf"], rows)));
    }

    let dir = cfg.output_dir.join(format!("{}.stats", stem(record)));
    let meta = StatsMeta {
        source: record.display().to_string(),
        r: file.r,
        symmetry: file.symmetry,
        region_choice: match cfg.region {
            RegionChoice::Scaled => "scaled",
            RegionChoice::Reference => "reference",
            RegionChoice::Custom(_) => "custom",
        },
        region,
        hyperbolic_area: hyperbolic_area(&region),
        grid_n: cfg.grid_n,
        samples: dist.samples.len(),
        normalization: "scaled by exp(pi r / 2)",
        sigma2: dist.sigma2,
        mean: dist.mean,
        ks_to_gaussian: dist.ks_to_gaussian,
        ks_critical: dist.ks_critical,
        passes_ks: dist.passes_ks(),
        sato_tate_primes: ap.len(),
        sato_tate_ks: sato_tate_distance(&primes).ok(),
        files: outputs.iter().map(|o| o.0.clone()).collect(),
    };
    for (name, text) in &outputs {
        write_output(&dir.join(name), text.as_bytes(), overwrite)?;
    }
    write_output(&dir.join("stats.json"), &to_json(&meta)?, overwrite)?;
    println!(
        "sigma2 {:.6e}  KS {:.4} (5% critical {:.4})  {} samples  -> {}",
        dist.sigma2,
        dist.ks_to_gaussian,
        dist.ks_critical,
        dist.samples.len(),
        dir.display()
    );
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_merges_ties() {
        let c = weighted_cdf(&[2.0, 1.0, 2.0, 3.0], &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(c, vec![(1.0, 0.25), (2.0, 0.75), (3.0, 1.0)]);
    }
}
