//! Value distribution of a form on a small region, against a centred Gaussian.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hejhal::{CoefficientVector, Hejhal};
use crate::math::{ceil, erfc, fabs, sqrt, PI};
use crate::modular_domain::UpperHalfPoint;
use crate::parallel::Parallel;

/// Axis-parallel box in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Square of side 0.00785 used at `r ≈ 40000`.
pub const REFERENCE_REGION: Region = Region { x_min: -0.3, x_max: -0.29215, y_min: 1.1, y_max: 1.10785 };

const REFERENCE_SIDE: f64 = 0.00785;
const REFERENCE_R: f64 = 40000.0;
/// Cap on the scaled side so the box stays well inside the fundamental domain.
pub const MAX_SIDE: f64 = 0.3;

impl Region {
    /// Allows `x_min = x_max` (zero area) but not inverted or non-positive heights.
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min > x_max || !(y_min > 0.0) || y_min >= y_max {
            return Err(Error::Domain(alloc::format!(
                "region [{x_min}, {x_max}] × [{y_min}, {y_max}] is not a box in the upper half-plane"
            )));
        }
        Ok(Region { x_min, x_max, y_min, y_max })
    }

    /// The square with the same centre as [`REFERENCE_REGION`] and side
    /// `min(0.00785 · 40000/r, 0.3)`.
    pub fn scaled_for(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Domain(alloc::format!("r must be positive, got {r}")));
        }
        let side = (REFERENCE_SIDE * REFERENCE_R / r).min(MAX_SIDE);
        let cx = 0.5 * (REFERENCE_REGION.x_min + REFERENCE_REGION.x_max);
        let cy = 0.5 * (REFERENCE_REGION.y_min + REFERENCE_REGION.y_max);
        Region::new(cx - 0.5 * side, cx + 0.5 * side, cy - 0.5 * side, cy + 0.5 * side)
    }
}

/// `∫∫ dx dy / y²` over the box.
pub fn hyperbolic_area(region: &Region) -> f64 {
    (region.x_max - region.x_min) * (1.0 / region.y_min - 1.0 / region.y_max)
}

/// `⌈√n⌉` clamped to `[32, 256]`.
pub fn bin_count(samples: usize) -> usize {
    (ceil(sqrt(samples as f64)) as usize).clamp(32, 256)
}

/// Equal-width bins over `[lo, hi]`; `masses` sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.masses.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    /// Mass divided by bin width.
    pub fn density(&self, i: usize) -> f64 {
        self.masses[i] / self.width()
    }
}

/// Weighted histogram spanning the sample range.
pub fn histogram(values: &[f64], weights: &[f64], bins: usize) -> Result<Histogram> {
    check_weights(values, weights)?;
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        let pad = if lo == 0.0 { 0.5 } else { 0.5 * fabs(lo) };
        lo -= pad;
        hi += pad;
    }
    histogram_range(values, weights, lo, hi, bins)
}

/// Weighted histogram over a fixed `[lo, hi]`; values outside are clamped
/// into the end bins.
pub fn histogram_range(values: &[f64], weights: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    check_weights(values, weights)?;
    if bins == 0 || !(lo < hi) {
        return Err(Error::Config(alloc::format!("need bins > 0 and lo < hi, got {bins} bins on [{lo}, {hi}]")));
    }
    let total: f64 = weights.iter().sum();
    let mut masses = vec![0.0; bins];
    let w = (hi - lo) / bins as f64;
    for (v, wt) in values.iter().zip(weights) {
        let i = (((v - lo) / w).max(0.0) as usize).min(bins - 1);
        masses[i] += wt / total;
    }
    Ok(Histogram { lo, hi, masses })
}

/// `Φ(u/σ)`, from the complementary error function.
pub fn gaussian_cdf(u: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(alloc::format!("sigma must be positive, got {sigma}")));
    }
    Ok(0.5 * erfc(-u / (sigma * core::f64::consts::SQRT_2)))
}

pub fn gaussian_density(u: f64, sigma: f64) -> f64 {
    let t = u / sigma;
    libm::exp(-0.5 * t * t) / (sqrt(2.0 * PI) * sigma)
}

fn check_weights(values: &[f64], weights: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch { left: values.len(), right: weights.len() });
    }
    if weights.iter().any(|w| !(*w >= 0.0)) || !(weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::Domain("weights must be non-negative with positive sum".into()));
    }
    Ok(())
}

/// `sup_u |F_w(u) − F(u)|` for the weighted empirical CDF `F_w`.
///
/// Tied values are merged, so a point mass is measured once.
pub fn ks_statistic(values: &[f64], weights: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    check_weights(values, weights)?;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let v = values[idx[i]];
        let f = cdf(v);
        d = d.max(fabs(f - acc / total));
        while i < idx.len() && values[idx[i]] == v {
            acc += weights[idx[i]];
            i += 1;
        }
        d = d.max(fabs(acc / total - f));
    }
    Ok(d.min(1.0))
}

/// Kish effective sample size `(Σw)² / Σw²`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Kolmogorov–Smirnov critical value at the 5% level, `1.358/(√n + 0.12 + 0.11/√n)`.
pub fn ks_critical_5(n: f64) -> f64 {
    let s = sqrt(n);
    1.358 / (s + 0.12 + 0.11 / s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    pub f: f64,
    /// `dx dy / y²` of the midpoint cell.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueDistribution {
    pub samples: Vec<GridSample>,
    /// `∫ f² dμ / ∫ dμ`.
    pub sigma2: f64,
    pub mean: f64,
    pub histogram: Histogram,
    pub ks_to_gaussian: f64,
    /// Critical value at 5% for the effective sample size.
    pub ks_critical: f64,
}

impl ValueDistribution {
    pub fn passes_ks(&self) -> bool {
        self.ks_to_gaussian <= self.ks_critical
    }
}

/// Midpoint lattice of `grid_n × grid_n` cells, row by row in `y`.
pub fn grid_points(region: &Region, grid_n: usize) -> Vec<(f64, f64, f64)> {
    let dx = (region.x_max - region.x_min) / grid_n as f64;
    let dy = (region.y_max - region.y_min) / grid_n as f64;
    let mut out = Vec::with_capacity(grid_n * grid_n);
    for j in 0..grid_n {
        let y = region.y_min + (j as f64 + 0.5) * dy;
        for i in 0..grid_n {
            let x = region.x_min + (i as f64 + 0.5) * dx;
            out.push((x, y, dx * dy / (y * y)));
        }
    }
    out
}

/// `f` on the midpoint lattice.
pub fn waveform_grid<P: Parallel>(
    hejhal: &Hejhal<P>,
    coeffs: &CoefficientVector,
    region: &Region,
    grid_n: usize,
) -> Result<Vec<GridSample>> {
    if grid_n == 0 {
        return Err(Error::Config("grid_n must be positive".into()));
    }
    let pts = grid_points(region, grid_n);
    let values = hejhal.parallel.map(pts.len(), &|k| {
        let (x, y, _) = pts[k];
        hejhal.evaluate_waveform(coeffs, UpperHalfPoint { x, y })
    });
    pts.iter()
        .zip(values)
        .map(|(&(x, y, weight), f)| Ok(GridSample { x, y, f: f?, weight }))
        .collect()
}

/// σ², histogram and KS distance to `N(0, σ²)` for weighted samples.
pub fn distribution_from_samples(samples: Vec<GridSample>) -> Result<ValueDistribution> {
    let values: Vec<f64> = samples.iter().map(|s| s.f).collect();
    let weights: Vec<f64> = samples.iter().map(|s| s.weight).collect();
    check_weights(&values, &weights)?;
    let total: f64 = weights.iter().sum();
    let sigma2 = values.iter().zip(&weights).map(|(f, w)| f * f * w).sum::<f64>() / total;
    let mean = values.iter().zip(&weights).map(|(f, w)| f * w).sum::<f64>() / total;
    let histogram = histogram(&values, &weights, bin_count(values.len()))?;
    let ks_to_gaussian = if sigma2 > 0.0 {
        let sigma = sqrt(sigma2);
        ks_statistic(&values, &weights, |u| 0.5 * erfc(-u / (sigma * core::f64::consts::SQRT_2)))?
    } else {
        1.0
    };
    let ks_critical = ks_critical_5(effective_sample_size(&weights));
    Ok(ValueDistribution { samples, sigma2, mean, histogram, ks_to_gaussian, ks_critical })
}

/// Requires `grid_n ≥ 32`.
pub fn value_distribution<P: Parallel>(
    hejhal: &Hejhal<P>,
    coeffs: &CoefficientVector,
    region: &Region,
    grid_n: usize,
) -> Result<ValueDistribution> {
    if grid_n < 32 {
        return Err(Error::Config(alloc::format!("grid_n must be at least 32, got {grid_n}")));
    }
    distribution_from_samples(waveform_grid(hejhal, coeffs, region, grid_n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas() {
        let unit = Region::new(0.0, 1.0, 1.0, 2.0).unwrap();
        assert!(fabs(hyperbolic_area(&unit) - 0.5) < 1e-16);
        let a = hyperbolic_area(&REFERENCE_REGION);
        assert!(fabs(a - 0.00785 * (1.0 / 1.1 - 1.0 / 1.10785)) < 1e-18);
        assert!(fabs(a - 5.058e-5) < 1e-7);
        assert_eq!(hyperbolic_area(&Region::new(0.2, 0.2, 1.0, 2.0).unwrap()), 0.0);
        assert!(Region::new(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(Region::new(1.0, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn fixed_range_histogram() {
        let h = histogram_range(&[-3.0, -1.5, 0.1, 1.9, 2.0], &[1.0; 5], -2.0, 2.0, 4).unwrap();
        assert_eq!(h.masses, vec![0.4, 0.0, 0.2, 0.4]);
        assert!(fabs(h.center(0) + 1.5) < 1e-15);
        assert!(histogram_range(&[0.0], &[1.0], 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn scaled_region() {
        let big = Region::scaled_for(40000.0).unwrap();
        assert!(fabs(big.x_min - REFERENCE_REGION.x_min) < 1e-12 && fabs(big.y_max - REFERENCE_REGION.y_max) < 1e-12);
        let small = Region::scaled_for(10.0).unwrap();
        assert!(fabs(small.x_max - small.x_min - MAX_SIDE) < 1e-15);
        assert!(fabs(0.5 * (small.y_min + small.y_max) - 1.103925) < 1e-12);
    }

    #[test]
    fn bins() {
        assert_eq!(bin_count(10), 32);
        assert_eq!(bin_count(4096), 64);
        assert_eq!(bin_count(1_000_000), 256);
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_cdf(0.0, 1.0).unwrap(), 0.5);
        assert!(fabs(gaussian_cdf(1.96 * 2.0, 2.0).unwrap() - 0.975_002_104_851_780) < 1e-12);
        assert!(fabs(gaussian_cdf(-1.0, 1.0).unwrap() - 0.158_655_253_931_457_05) < 1e-12);
        for u in [0.1, 0.7, 2.5, 6.0] {
            assert!(fabs(gaussian_cdf(u, 1.3).unwrap() + gaussian_cdf(-u, 1.3).unwrap() - 1.0) < 1e-15);
        }
        assert!(gaussian_cdf(1.0, 0.0).is_err());
    }

    #[test]
    fn histogram_mass_is_conserved() {
        let v: Vec<f64> = (0..1000).map(|i| libm::sin(i as f64)).collect();
        let w: Vec<f64> = (0..1000).map(|i| 1.0 + (i % 7) as f64).collect();
        for bins in [1, 32, 77, 256] {
            let h = histogram(&v, &w, bins).unwrap();
            assert!(fabs(h.masses.iter().sum::<f64>() - 1.0) < 1e-12);
        }
    }

    #[test]
    fn constant_field_is_a_point_mass() {
        let s: Vec<_> = (0..100).map(|i| GridSample { x: i as f64, y: 1.0, f: 0.7, weight: 1.0 }).collect();
        let d = distribution_from_samples(s).unwrap();
        assert!(fabs(d.sigma2 - 0.49) < 1e-15);
        // the whole mass sits at one point, half a unit above Φ(1) ≈ 0.84
        assert!(d.ks_to_gaussian > 0.15 && !d.passes_ks());
    }

    #[test]
    fn ks_exact_small_case() {
        // uniform cdf on [0,1], samples 0.25 and 0.75: sup distance 0.25
        let d = ks_statistic(&[0.25, 0.75], &[1.0, 1.0], |u| u.clamp(0.0, 1.0)).unwrap();
        assert!(fabs(d - 0.25) < 1e-16);
        assert!(ks_statistic(&[], &[], |u| u).is_err());
        assert!(ks_statistic(&[1.0], &[1.0, 2.0], |u| u).is_err());
    }

    #[test]
    fn critical_value() {
        assert!(fabs(ks_critical_5(100.0) - 1.358 / (10.0 + 0.12 + 0.011)) < 1e-15);
        assert!(fabs(effective_sample_size(&[1.0; 50]) - 50.0) < 1e-12);
    }

    #[test]
    fn lattice_shape() {
        let r = Region::new(-0.1, 0.1, 1.0, 1.2).unwrap();
        let pts = grid_points(&r, 32);
        assert_eq!(pts.len(), 1024);
        let area: f64 = pts.iter().map(|p| p.2).sum();
        assert!(fabs(area - hyperbolic_area(&r)) < 1e-5 * area);
    }
}
