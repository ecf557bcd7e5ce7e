//! Truncation, sampling and the linear system of Hejhal's method.
//!
//! With `w_n(y) = √y · e^{πr/2}K_{ir}(2πny)` and `z*_j` the pullback of
//! `x_j + iy`, the system matrix is
//!
//! ```text
//! V_mn(r, y) = w_m(y) δ_mn − (1/2Q) Σ_j w_n(y*_j) cs(2πn x*_j) cs(2πm x_j).
//! ```
//!
//! The finite Fourier transform behind it recovers `a_m w_m` with the kernel
//! `cs(2πm x)` in both symmetry classes (for odd forms, `cs(−2πmx)` would give
//! `−a_m w_m`).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, fabs, sin, sqrt, PI};
use crate::modular_domain::{pullback, UpperHalfPoint, Y0};
use crate::parallel::{Parallel, Serial};
use crate::special_functions::BesselEvaluator;

/// Padding of `Q` over `M0`.
pub const Q_PADDING: usize = 8;
/// Ratio `y^{#2} / y^{#1}`.
pub const Y2_RATIO: f64 = 0.9;
/// Smallest acceptable `min_m |K(2πm y^{#1})|` relative to the peak.
pub const DIAGONAL_FLOOR: f64 = 1e-3;
const Y1_NUDGE: f64 = 0.98;
const Y1_RETRIES: usize = 40;
/// Rank tolerance of the elimination, relative to the largest matrix entry.
pub const PIVOT_TOLERANCE: f64 = 1e-10;
/// Fraction of rank-deficient pivots beyond which a solve is refused.
pub const MAX_DEFICIENT_FRACTION: f64 = 0.1;
/// Bessel accuracy requested by the solver, relative to the peak value.
pub const BESSEL_RELATIVE_TARGET: f64 = 1e-14;
/// Truncation level of the system actually solved. Coefficients near the
/// cut-off of a system are poorly determined, so the solver carries guard
/// coefficients up to this level and reports only the first `M0`.
pub const SOLVE_EPS: f64 = 1e-15;
/// Minimum number of guard coefficients.
pub const MIN_GUARD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Symmetry {
    Even,
    Odd,
}

impl Symmetry {
    /// `2cos t` for even forms, `2sin t` for odd ones.
    pub fn cs(self, t: f64) -> f64 {
        match self {
            Symmetry::Even => 2.0 * cos(t),
            Symmetry::Odd => 2.0 * sin(t),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Even => "even",
            Symmetry::Odd => "odd",
        }
    }
}

impl core::fmt::Display for Symmetry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "Even" => Ok(Symmetry::Even),
            "odd" | "Odd" => Ok(Symmetry::Odd),
            _ => Err(Error::Config(alloc::format!("unknown symmetry '{s}' (expected even or odd)"))),
        }
    }
}

/// Everything the solver needs at one `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPlan {
    pub eps: f64,
    pub r: f64,
    pub m0: usize,
    /// Size of the solved system, `M0` plus guard coefficients.
    pub m_solve: usize,
    /// Number of sample points, `m_solve + 8`.
    pub q: usize,
    pub y1: f64,
    pub y2: f64,
    /// `(j − 1/2)/(2Q)`, `j = 1..Q`.
    pub sample_xs: Vec<f64>,
    /// Peak of the scaled K-Bessel function at `r`.
    pub peak: f64,
}

impl TruncationPlan {
    /// Absolute Bessel accuracy used with this plan.
    pub fn bessel_target(&self) -> f64 {
        BESSEL_RELATIVE_TARGET * self.peak
    }

    /// Same sampling rule at another order, keeping `M0`, `y^{#1}`, `y^{#2}`.
    pub fn at(&self, r: f64) -> TruncationPlan {
        TruncationPlan { r, ..self.clone() }
    }
}

/// Coefficients `a_1..a_{M0}` with `a_1 = 1`; `a[0]` holds `a_1`.
///
/// `guard` holds the solver's extra coefficients `a_{M0+1}..`; they are used
/// for residuals and waveform values but are not reported.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub symmetry: Symmetry,
    pub r: f64,
    pub a: Vec<f64>,
    pub guard: Vec<f64>,
}

impl CoefficientVector {
    /// Coefficients without guard entries.
    pub fn new(symmetry: Symmetry, r: f64, a: Vec<f64>) -> Self {
        CoefficientVector { symmetry, r, a, guard: Vec::new() }
    }

    /// `a_n` for `n ≥ 1`, zero past the end.
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.a.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Reported and guard coefficients in order.
    pub fn all(&self) -> impl Iterator<Item = f64> + '_ {
        self.a.iter().chain(self.guard.iter()).copied()
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// `g_m = Σ_n V_mn(r, y^{#2}) a_n`; `g[0]` holds `g_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    pub g: Vec<f64>,
}

impl ResidualVector {
    pub fn max_abs(&self) -> f64 {
        self.g.iter().fold(0.0, |m, v| m.max(fabs(*v)))
    }
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.n + col] = v;
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch { left: self.n, right: v.len() });
        }
        Ok((0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(alloc::format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Symmetry-independent part of `V(r, y)`: for each sample `j`, its
/// pullback `z*_j` and the factors `w_n(y*_j) = √y*_j K(2πn y*_j)`.
struct BesselSamples {
    /// `(x_j, x*_j)`
    xs: Vec<(f64, f64)>,
    /// `weights[j * size + (n−1)]`
    weights: Vec<f64>,
    /// `w_m(y)`
    diagonal: Vec<f64>,
}

/// The solver: a Bessel evaluator plus a parallel map for row/sample work.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hejhal<P = Serial> {
    pub bessel: BesselEvaluator,
    pub parallel: P,
}

impl<P: Parallel> Hejhal<P> {
    pub fn new(bessel: BesselEvaluator, parallel: P) -> Self {
        Hejhal { bessel, parallel }
    }

    /// Smallest `M` with `2πMy ≥ r` and `|K(2πMy)| ≤ ε · peak` (scaled form).
    pub fn truncation_order(&self, eps: f64, r: f64, y: f64) -> Result<usize> {
        check_positive("eps", eps)?;
        check_positive("r", r)?;
        check_positive("y", y)?;
        let peak = self.bessel.peak(r);
        self.truncation_order_with_peak(eps, r, y, peak)
    }

    /// [`Hejhal::truncation_order`] with a known peak value.
    pub fn truncation_order_with_peak(&self, eps: f64, r: f64, y: f64, peak: f64) -> Result<usize> {
        let step = 2.0 * PI * y;
        let first = crate::math::ceil(r / step).max(1.0) as usize;
        let bound = eps * peak;
        let small = |m: usize| -> Result<bool> {
            let v = self.bessel.value(r, step * m as f64, 1e-3 * bound)?;
            Ok(fabs(v) <= bound)
        };
        if small(first)? {
            return Ok(first);
        }
        // beyond x = r the function decreases, so gallop then bisect
        let mut lo = first;
        let mut width = 1usize;
        let mut hi = first + width;
        while !small(hi)? {
            lo = hi;
            width *= 2;
            hi = first + width;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if small(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Plan at `(ε, r)`: `M0` from height `√3/2`, `y^{#1} = r/(2πM0)` nudged
    /// down until no diagonal entry is tiny, `y^{#2} = 0.9 y^{#1}`, `Q` equal
    /// to the solved size plus 8.
    pub fn make_plan(&self, eps: f64, r: f64) -> Result<TruncationPlan> {
        check_positive("eps", eps)?;
        check_positive("r", r)?;
        let peak = self.bessel.peak(r);
        let m0 = self.truncation_order_with_peak(eps, r, Y0, peak)?.max(2);
        let deep = self.truncation_order_with_peak(eps.min(SOLVE_EPS), r, Y0, peak)?;
        self.plan_with_m0(eps, r, m0, deep.max(m0 + MIN_GUARD), peak)
    }

    /// Plan with prescribed `M0 ≥ 2` and solved size `m_solve ≥ M0`.
    pub fn plan_with_m0(&self, eps: f64, r: f64, m0: usize, m_solve: usize, peak: f64) -> Result<TruncationPlan> {
        if m0 < 2 || m_solve < m0 {
            return Err(Error::Config(alloc::format!("need 2 ≤ M0 ≤ solved size, got {m0} and {m_solve}")));
        }
        let target = BESSEL_RELATIVE_TARGET * peak;
        let mut y1 = r / (2.0 * PI * m0 as f64);
        if y1 >= Y0 {
            y1 = Y0 * Y1_NUDGE;
        }
        let min_diag = |y: f64| -> Result<f64> {
            let mut least = f64::INFINITY;
            for m in 1..=m0 {
                let v = self.bessel.value(r, 2.0 * PI * m as f64 * y, target)?;
                least = least.min(fabs(v));
            }
            Ok(least)
        };
        let (mut best_y, mut best) = (y1, min_diag(y1)?);
        let mut y = y1;
        for _ in 0..Y1_RETRIES {
            if best >= DIAGONAL_FLOOR * peak {
                break;
            }
            y *= Y1_NUDGE;
            let v = min_diag(y)?;
            if v > best {
                best = v;
                best_y = y;
            }
        }
        let q = m_solve + Q_PADDING;
        let sample_xs = (1..=q).map(|j| (j as f64 - 0.5) / (2.0 * q as f64)).collect();
        Ok(TruncationPlan { eps, r, m0, m_solve, q, y1: best_y, y2: Y2_RATIO * best_y, sample_xs, peak })
    }

    fn bessel_samples(&self, r: f64, y: f64, plan: &TruncationPlan) -> Result<BesselSamples> {
        check_positive("r", r)?;
        if !(y > 0.0 && y < Y0) {
            return Err(Error::Domain(alloc::format!("sampling height must lie in (0, √3/2), got {y}")));
        }
        let size = plan.m_solve;
        let target = plan.bessel_target();
        let rows: Vec<Result<(f64, Vec<f64>)>> = self.parallel.map(plan.q, &|j| {
            let x = plan.sample_xs[j];
            let star = pullback(UpperHalfPoint { x, y })?;
            let ys = star.point.y;
            let sy = sqrt(ys);
            let mut w = Vec::with_capacity(size);
            for n in 1..=size {
                let k = self.bessel.value(r, 2.0 * PI * n as f64 * ys, target).map_err(|e| Error::Matrix {
                    m: 0,
                    n,
                    x,
                    source: alloc::boxed::Box::new(e),
                })?;
                w.push(sy * k);
            }
            Ok((star.point.x, w))
        });
        let mut out = BesselSamples {
            xs: Vec::with_capacity(plan.q),
            weights: Vec::with_capacity(plan.q * size),
            diagonal: Vec::with_capacity(size),
        };
        for (j, row) in rows.into_iter().enumerate() {
            let (x_star, w) = row?;
            out.xs.push((plan.sample_xs[j], x_star));
            out.weights.extend(w);
        }
        let sy = sqrt(y);
        for m in 1..=size {
            let k = self.bessel.value(r, 2.0 * PI * m as f64 * y, target).map_err(|e| Error::Matrix {
                m,
                n: m,
                x: 0.0,
                source: alloc::boxed::Box::new(e),
            })?;
            out.diagonal.push(sy * k);
        }
        Ok(out)
    }

    fn assemble(&self, s: &BesselSamples, symmetry: Symmetry) -> Matrix {
        let size = s.diagonal.len();
        let q = s.xs.len();
        let scale = 1.0 / (2.0 * q as f64);
        // pulled[j][n] = w_n(y*_j) cs(2πn x*_j),  kernel[j][m] = cs(2πm x_j)
        let mut pulled = vec![0.0; q * size];
        let mut kernel = vec![0.0; q * size];
        for (j, &(x, x_star)) in s.xs.iter().enumerate() {
            for n in 0..size {
                let t = 2.0 * PI * (n + 1) as f64;
                pulled[j * size + n] = s.weights[j * size + n] * symmetry.cs(t * x_star);
                kernel[j * size + n] = symmetry.cs(t * x);
            }
        }
        let rows: Vec<Vec<f64>> = self.parallel.map(size, &|m| {
            let mut row = vec![0.0; size];
            for j in 0..q {
                let c = kernel[j * size + m] * scale;
                let p = &pulled[j * size..(j + 1) * size];
                for (v, pn) in row.iter_mut().zip(p) {
                    *v -= pn * c;
                }
            }
            row[m] += s.diagonal[m];
            row
        });
        let mut v = Matrix::zeros(size);
        for (m, row) in rows.into_iter().enumerate() {
            v.data[m * size..(m + 1) * size].copy_from_slice(&row);
        }
        v
    }

    /// `V(r, y)` over the solved size (zero-based indices `m−1`, `n−1`).
    pub fn build_matrix(&self, r: f64, y: f64, plan: &TruncationPlan, symmetry: Symmetry) -> Result<Matrix> {
        let s = self.bessel_samples(r, y, plan)?;
        Ok(self.assemble(&s, symmetry))
    }

    /// Coefficients at `y^{#1}` with `a_1 = 1`.
    pub fn solve_coefficients(&self, r: f64, plan: &TruncationPlan, symmetry: Symmetry) -> Result<CoefficientVector> {
        self.solve_at(r, plan.y1, plan, symmetry)
    }

    /// Coefficients from the inhomogeneous system at an arbitrary height.
    pub fn solve_at(&self, r: f64, y: f64, plan: &TruncationPlan, symmetry: Symmetry) -> Result<CoefficientVector> {
        let v = self.build_matrix(r, y, plan, symmetry)?;
        solve_from_matrix(&v, r, symmetry, plan.m0)
    }

    /// `g_m = Σ_n V_mn(r, y^{#2}) a_n` for `m = 1..M0`.
    pub fn residual_vector(&self, r: f64, plan: &TruncationPlan, coeffs: &CoefficientVector) -> Result<ResidualVector> {
        let v = self.build_matrix(r, plan.y2, plan, coeffs.symmetry)?;
        residual_from_matrix(&v, plan, coeffs)
    }

    /// Coefficients at `y^{#1}` and their residual at `y^{#2}`; optionally also
    /// the coefficients re-solved at `y^{#2}`.
    pub fn step(&self, r: f64, plan: &TruncationPlan, symmetry: Symmetry, resolve_y2: bool) -> Result<SolveStep> {
        let coeffs = self.solve_coefficients(r, plan, symmetry)?;
        let v2 = self.build_matrix(r, plan.y2, plan, symmetry)?;
        let residual = residual_from_matrix(&v2, plan, &coeffs)?;
        let at_y2 = if resolve_y2 { Some(solve_from_matrix(&v2, r, symmetry, plan.m0)?) } else { None };
        Ok(SolveStep { coeffs, residual, at_y2 })
    }

    /// [`Hejhal::step`] without the `y^{#2}` re-solve for both symmetries at
    /// once, sharing the Bessel factors; returns `(even, odd)`.
    pub fn step_both(&self, r: f64, plan: &TruncationPlan) -> Result<(Result<SolveStep>, Result<SolveStep>)> {
        let s1 = self.bessel_samples(r, plan.y1, plan)?;
        let s2 = self.bessel_samples(r, plan.y2, plan)?;
        let one = |symmetry: Symmetry| -> Result<SolveStep> {
            let coeffs = solve_from_matrix(&self.assemble(&s1, symmetry), r, symmetry, plan.m0)?;
            let residual = residual_from_matrix(&self.assemble(&s2, symmetry), plan, &coeffs)?;
            Ok(SolveStep { coeffs, residual, at_y2: None })
        };
        Ok((one(Symmetry::Even), one(Symmetry::Odd)))
    }

    /// `f(z)` in the scaled normalization, after pulling `z` into the fundamental domain.
    pub fn evaluate_waveform(&self, coeffs: &CoefficientVector, z: UpperHalfPoint) -> Result<f64> {
        let star = pullback(z)?;
        self.fourier_sum(coeffs, star.point)
    }

    /// The truncated Fourier series at `z` as given, without pullback.
    pub fn fourier_sum(&self, coeffs: &CoefficientVector, z: UpperHalfPoint) -> Result<f64> {
        let r = coeffs.r;
        let target = BESSEL_RELATIVE_TARGET;
        let sy = sqrt(z.y);
        let mut sum = 0.0;
        for (i, a) in coeffs.all().enumerate() {
            let t = 2.0 * PI * (i + 1) as f64;
            let k = self.bessel.value(r, t * z.y, target)?;
            sum += a * sy * k * coeffs.symmetry.cs(t * z.x);
        }
        Ok(sum)
    }
}

/// Output of [`Hejhal::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStep {
    pub coeffs: CoefficientVector,
    pub residual: ResidualVector,
    pub at_y2: Option<CoefficientVector>,
}

fn residual_from_matrix(v: &Matrix, plan: &TruncationPlan, coeffs: &CoefficientVector) -> Result<ResidualVector> {
    let full: Vec<f64> = coeffs.all().collect();
    let mut g = v.mul_vec(&full)?;
    g.truncate(plan.m0);
    Ok(ResidualVector { g })
}

/// Solves rows `m = 2..M` of `Σ_{n≥2} V_mn a_n = −V_m1` for an `M × M`
/// matrix and reports the first `m0` coefficients.
///
/// Partial pivoting by rows; a column whose best pivot is below
/// `1e-10 · max|V|` gets `a_n = 0` and consumes no row.
pub fn solve_from_matrix(v: &Matrix, r: f64, symmetry: Symmetry, m0: usize) -> Result<CoefficientVector> {
    let size = v.n;
    if size < 2 || m0 > size {
        return Err(Error::Degenerate("system needs 2 ≤ M0 ≤ matrix size"));
    }
    let k = size - 1;
    // augmented k × (k+1)
    let w = k + 1;
    let mut aug = vec![0.0; k * w];
    let mut biggest = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let e = v.get(i + 1, j + 1);
            aug[i * w + j] = e;
            biggest = biggest.max(fabs(e));
        }
        aug[i * w + k] = -v.get(i + 1, 0);
    }
    if !(biggest > 0.0) || !biggest.is_finite() {
        return Err(Error::Degenerate("system matrix is zero or not finite"));
    }
    let tol = PIVOT_TOLERANCE * biggest;
    let mut pivot_row_of = vec![usize::MAX; k];
    let mut next_row = 0;
    let mut deficient = 0;
    for col in 0..k {
        let mut best = next_row;
        let mut best_val = 0.0;
        for i in next_row..k {
            let e = fabs(aug[i * w + col]);
            if e > best_val {
                best_val = e;
                best = i;
            }
        }
        if next_row >= k || best_val < tol {
            deficient += 1;
            continue;
        }
        if best != next_row {
            for j in 0..w {
                aug.swap(best * w + j, next_row * w + j);
            }
        }
        let p = aug[next_row * w + col];
        for i in next_row + 1..k {
            let f = aug[i * w + col] / p;
            if f != 0.0 {
                for j in col..w {
                    aug[i * w + j] -= f * aug[next_row * w + j];
                }
            }
        }
        pivot_row_of[col] = next_row;
        next_row += 1;
    }
    if deficient as f64 > MAX_DEFICIENT_FRACTION * k as f64 {
        return Err(Error::IllConditioned { r, deficient, total: k });
    }
    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let row = pivot_row_of[col];
        if row == usize::MAX {
            continue;
        }
        let mut s = aug[row * w + k];
        for j in col + 1..k {
            s -= aug[row * w + j] * x[j];
        }
        x[col] = s / aug[row * w + col];
    }
    let mut a = Vec::with_capacity(size);
    a.push(1.0);
    a.extend(x);
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned { r, deficient, total: k });
    }
    let guard = a.split_off(m0);
    Ok(CoefficientVector { symmetry, r, a, guard })
}

/// `ã = a / ‖a‖₂`.
pub fn normalize_coeffs(a: &[f64]) -> Result<Vec<f64>> {
    let norm = sqrt(a.iter().map(|v| v * v).sum::<f64>());
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate("coefficient vector has zero or non-finite norm"));
    }
    Ok(a.iter().map(|v| v / norm).collect())
}

/// [`Hejhal::truncation_order`] with the default evaluator.
pub fn truncation_order(eps: f64, r: f64, y: f64) -> Result<usize> {
    Hejhal::<Serial>::default().truncation_order(eps, r, y)
}

/// [`Hejhal::make_plan`] with the default evaluator.
pub fn make_plan(eps: f64, r: f64) -> Result<TruncationPlan> {
    Hejhal::<Serial>::default().make_plan(eps, r)
}
