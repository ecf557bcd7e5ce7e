//! Slow but trustworthy evaluation of `e^{πr/2} K_{ir}(x)` from its integral
//! representation.
//!
//! The contour of `½∫ e^{−x cosh t + irt} dt` is shifted to `Im t = π/2 − δ`,
//! which turns the exponentially small `K_{ir}` into an `O(1)` integral:
//!
//! ```text
//! e^{πr/2} K_{ir}(x) = e^{E(δ)} ∫₀^∞ e^{−x sin δ (cosh t − 1)} cos(rt − x cos δ sinh t) dt,
//! E(δ) = rδ − x sin δ.
//! ```
//!
//! `δ` is pushed as far as a bounded cancellation factor allows (through the
//! saddle point for `x > r`) and the range is cut where the integrand is
//! negligible. The integrand is even, entire and decays like `e^{−a cosh t}`,
//! so the trapezoid rule on the `t`-line already is a double-exponential rule
//! and converges geometrically in `1/h`; the step is halved until two
//! successive sums agree.

use crate::error::{Error, Result};
use crate::math::{acosh, cos, cosh, exp, log, sin, sinh, PI};

/// Accepted growth of `e^{E(δ)}` over its minimum (cancellation budget).
const CANCELLATION: f64 = 3.4;
const MAX_LEVEL: u32 = 14;
const ROUNDING_FACTOR: f64 = 4.0;

/// Result of a quadrature run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureValue {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
}

fn exponent(r: f64, x: f64, delta: f64) -> f64 {
    r * delta - x * sin(delta)
}

fn choose_shift(r: f64, x: f64) -> f64 {
    let saddle = if x > r { crate::math::acos_clamped(r / x) } else { 0.0 };
    let floor = exponent(r, x, saddle);
    let limit = floor + CANCELLATION;
    let top = PI / 2.0;
    if exponent(r, x, top) <= limit {
        return top;
    }
    let (mut lo, mut hi) = (saddle, top);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if exponent(r, x, mid) <= limit {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `e^{πr/2} K_{ir}(x)` with absolute error at most `tol`.
pub fn k_bessel_quadrature(r: f64, x: f64, tol: f64) -> Result<f64> {
    quadrature_detail(r, x, tol).map(|q| q.value)
}

/// Like [`k_bessel_quadrature`], with the error estimate and node count.
pub fn quadrature_detail(r: f64, x: f64, tol: f64) -> Result<QuadratureValue> {
    let (q, converged) = integrate(r, x, tol)?;
    if !converged || q.error > tol {
        return Err(Error::Convergence { r: r.abs(), x, estimate: q.value, error: q.error });
    }
    Ok(q)
}

/// Best effort: when `tol` is below the rounding level, the result carries
/// the achievable error instead of failing.
pub(crate) fn quadrature_best_effort(r: f64, x: f64, tol: f64) -> Result<QuadratureValue> {
    let (q, converged) = integrate(r, x, tol)?;
    if !converged {
        return Err(Error::Convergence { r: r.abs(), x, estimate: q.value, error: q.error });
    }
    Ok(q)
}

fn integrate(r: f64, x: f64, tol: f64) -> Result<(QuadratureValue, bool)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(alloc::format!("K-Bessel argument must be positive, got x={x}")));
    }
    if !r.is_finite() {
        return Err(Error::Domain(alloc::format!("K-Bessel order must be finite, got r={r}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(alloc::format!("quadrature tolerance must be positive, got {tol}")));
    }
    let r = r.abs();
    let delta = choose_shift(r, x);
    let e_shift = exponent(r, x, delta);
    let a = x * sin(delta);
    let b = x * cos(delta);
    let scale = exp(e_shift);

    // Tolerance on the bare integral; relative once e^{E} is below one.
    let tol_int = tol / scale.max(1.0);
    let tail = CANCELLATION + log(100.0 / tol_int.min(1.0)).max(1.0);
    let t_end = acosh(1.0 + tail / a);

    let integrand = |t: f64| exp(-a * (cosh(t) - 1.0)) * cos(r * t - b * sinh(t));
    // fastest phase change on [0, T]
    let freq = r.max(b * cosh(t_end)).max(a * sinh(t_end)).max(1.0);
    let mut n = 8usize;
    while t_end / (n as f64) > 1.0 / freq && n < (1 << 20) {
        n *= 2;
    }
    let mut h = t_end / n as f64;
    let mut sum = 0.5 * integrand(0.0);
    let mut abs_sum = sum.abs();
    for k in 1..=n {
        let v = integrand(k as f64 * h);
        sum += v;
        abs_sum += v.abs();
    }
    let mut nodes = n + 1;
    let mut estimate = sum * h;
    let mut last_diff = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        let mut mid = 0.0;
        for k in 0..n {
            let v = integrand((k as f64 + 0.5) * h);
            mid += v;
            abs_sum += v.abs();
        }
        nodes += n;
        sum += mid;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        last_diff = (next - estimate).abs();
        estimate = next;
        let rounding = ROUNDING_FACTOR * f64::EPSILON * abs_sum * h;
        if last_diff <= tol_int.max(rounding) {
            let error = last_diff.max(rounding);
            return Ok((QuadratureValue { value: scale * estimate, error: scale * error, nodes }, true));
        }
    }
    Ok((QuadratureValue { value: scale * estimate, error: scale * last_diff, nodes }, false))
}
