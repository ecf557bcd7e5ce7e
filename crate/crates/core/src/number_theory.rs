//! Arithmetic checks on Fourier coefficients: Hecke relations, the
//! Ramanujan–Petersson and divisor bounds, Sato–Tate, and Eisenstein series.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hejhal::{CoefficientVector, Symmetry};
use crate::math::{asin, cos, fabs, log, sin, sqrt, PI};
use crate::statistics::ks_statistic;

/// Primes `≤ n` by the sieve of Eratosthenes.
pub fn sieve(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Number of positive divisors.
pub fn divisor_count(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeckeReport {
    pub max_residual: f64,
    /// `(m, p, mp)` where the largest residual occurred.
    pub worst_triple: (usize, usize, usize),
    pub checked_count: usize,
    /// Hecke eigenvalues `t_m = a_m / a_1`.
    pub t_values: Vec<f64>,
}

/// `|a_{mp} − (a_m a_p − a_{m/p})|` over primes `p` and `m ≥ 2` with `mp ≤ M0`.
///
/// `a[0]` holds `a_1`; `a_{m/p}` is zero unless `p | m`.
pub fn hecke_residuals(a: &[f64]) -> HeckeReport {
    let n = a.len();
    let at = |k: usize| a[k - 1];
    let mut report = HeckeReport {
        max_residual: 0.0,
        worst_triple: (0, 0, 0),
        checked_count: 0,
        t_values: match a.first() {
            Some(&a1) if a1 != 0.0 => a.iter().map(|v| v / a1).collect(),
            _ => Vec::new(),
        },
    };
    for p in sieve(n / 2) {
        for m in 2..=n / p {
            let back = if m % p == 0 { at(m / p) } else { 0.0 };
            let res = fabs(at(m * p) - (at(m) * at(p) - back));
            report.checked_count += 1;
            if res > report.max_residual || report.worst_triple.0 == 0 {
                report.max_residual = report.max_residual.max(res);
                report.worst_triple = (m, p, m * p);
            }
        }
    }
    report
}

/// Prime-indexed coefficients `(p, a_p)`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeCoefficientSet {
    pub pairs: Vec<(usize, f64)>,
}

impl PrimeCoefficientSet {
    pub fn from_coefficients(a: &[f64]) -> Self {
        PrimeCoefficientSet { pairs: sieve(a.len()).into_iter().map(|p| (p, a[p - 1])).collect() }
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|&(_, v)| v).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamanujanReport {
    pub max_abs: f64,
    /// Primes with `|a_p| > 2`.
    pub violations: Vec<(usize, f64)>,
}

pub fn ramanujan_check(a: &[f64]) -> RamanujanReport {
    let set = PrimeCoefficientSet::from_coefficients(a);
    let max_abs = set.pairs.iter().fold(0.0f64, |m, &(_, v)| m.max(fabs(v)));
    let violations = set.pairs.into_iter().filter(|&(_, v)| fabs(v) > 2.0).collect();
    RamanujanReport { max_abs, violations }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub worst_ratio: f64,
    pub worst_n: usize,
}

/// Largest `|a_n| / (d(n) n^{1/4})`.
pub fn coefficient_bound_check(a: &[f64]) -> BoundReport {
    let mut out = BoundReport { worst_ratio: 0.0, worst_n: 0 };
    for (i, v) in a.iter().enumerate() {
        let n = i + 1;
        let bound = divisor_count(n) as f64 * sqrt(sqrt(n as f64));
        let ratio = fabs(*v) / bound;
        if ratio > out.worst_ratio || out.worst_n == 0 {
            out = BoundReport { worst_ratio: ratio.max(out.worst_ratio), worst_n: n };
        }
    }
    out
}

/// Fourier coefficients of the Eisenstein series at spectral parameter `r`:
/// `a_n = Σ_{cd=n, c,d>0} (c/d)^{ir}`, which is real.
///
/// `n^{ir}` is tabulated as a completely multiplicative unit character built
/// from `p^{ir}`, so the phases `r ln n` never have to be formed for large `n`.
pub fn eisenstein_coeffs(r: f64, n_max: usize) -> Result<CoefficientVector> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut chi = vec![(1.0f64, 0.0f64); n_max + 1];
    let mut least = vec![0usize; n_max + 1];
    for p in sieve(n_max) {
        let mut k = p;
        while k <= n_max {
            if least[k] == 0 {
                least[k] = p;
            }
            k += p;
        }
    }
    for n in 2..=n_max {
        let p = least[n];
        let (c, s) = if p == n {
            let t = r * log(p as f64);
            (cos(t), sin(t))
        } else {
            chi[p]
        };
        let (a, b) = if p == n { (1.0, 0.0) } else { chi[n / p] };
        chi[n] = (a * c - b * s, a * s + b * c);
    }
    let mut a = vec![0.0; n_max];
    for c in 1..=n_max {
        for d in 1..=n_max / c {
            // (c/d)^{ir} = χ(c)·conj χ(d); real part only
            let (x1, y1) = chi[c];
            let (x2, y2) = chi[d];
            a[c * d - 1] += x1 * x2 + y1 * y2;
        }
    }
    Ok(CoefficientVector::new(Symmetry::Even, r, a))
}

/// CDF of the semicircle density `√(4−u²)/(2π)` on `[−2, 2]`.
pub fn semicircle_cdf(u: f64) -> f64 {
    if u <= -2.0 {
        return 0.0;
    }
    if u >= 2.0 {
        return 1.0;
    }
    0.5 + (u * sqrt(4.0 - u * u) + 4.0 * asin(0.5 * u)) / (4.0 * PI)
}

pub fn semicircle_density(u: f64) -> f64 {
    if fabs(u) >= 2.0 {
        0.0
    } else {
        sqrt(4.0 - u * u) / (2.0 * PI)
    }
}

/// Inverse of [`semicircle_cdf`] by bisection, for `p ∈ [0, 1]`.
pub fn semicircle_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(alloc::format!("probability {p} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    // 60 halvings take the bracket below one ulp of 2
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Kolmogorov–Smirnov distance of the `a_p` from the semicircle law.
pub fn sato_tate_distance(primes: &PrimeCoefficientSet) -> Result<f64> {
    if primes.pairs.is_empty() {
        return Err(Error::Empty("prime coefficient set"));
    }
    let values = primes.values();
    let weights = vec![1.0; values.len()];
    ks_statistic(&values, &weights, semicircle_cdf)
}
