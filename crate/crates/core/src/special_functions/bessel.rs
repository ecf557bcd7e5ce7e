//! `e^{πr/2} K_{ir}(x)` for large imaginary order.
//!
//! All large-order evaluators share one variable, `u = 1 − (x/r)²`, and the
//! function `3S(u)` defined by `artanh q − q = q³S(q²)`. In that variable the
//! uniform (Airy-type) expansion reads
//!
//! ```text
//! e^{πr/2}K_{ir}(x) ~ 2^{1/3} π r^{−1/3} (3S)^{1/6}
//!     [ Ai(ξ) Σ A_k(u)/r^{2k} + 2^{1/3} Ai'(ξ) Σ B̂_k(u)/r^{2k+4/3} ],
//! ξ = −r^{2/3} u (3S)^{2/3} / 2^{2/3},
//! ```
//!
//! which is real on both sides of the turning point `u = 0`. Away from the
//! turning point `A_k`, `B̂_k` are summed from `λ_s` and `u_k(γ)` directly; near
//! it they are read from exact Taylor tables, because the direct sums cancel.

use crate::error::{Error, Regime, Result};
use crate::math::{atan, cbrt, exp, fabs, log, pow, sin, cos, sqrt, PI};

use super::airy::{airy_pair, AI_ZERO};
use super::quadrature;
use super::tables::{poly_abs_eval, poly_eval, tables, CoefficientTables, TAYLOR_ORDER, TURNING_TERMS};

const CBRT2: f64 = 1.259_921_049_894_873_2;
const EPS_MACH: f64 = f64::EPSILON;

/// `|u|` below which `3S(u)` is summed from its power series.
const SERIES_U: f64 = 0.25;
/// Largest `|u|` at which the turning-point Taylor tables are trusted.
pub const TURNING_U_MAX: f64 = 0.4;

/// Order `r ≥ 0` and argument `x > 0` of `K_{ir}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselArgs {
    pub r: f64,
    pub x: f64,
}

impl BesselArgs {
    /// Validates the argument and folds the order onto `r ≥ 0` (`K_{ir} = K_{−ir}`).
    pub fn new(r: f64, x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(alloc::format!("K-Bessel argument must be positive, got x={x}")));
        }
        if !r.is_finite() {
            return Err(Error::Domain(alloc::format!("K-Bessel order must be finite, got r={r}")));
        }
        Ok(BesselArgs { r: r.abs(), x })
    }
}

/// Turning-point variables of the uniform expansion.
///
/// For `x < r`, `gamma` is `γ = 1/√(1−β²)`; for `x > r` it holds the positive
/// branch value `−iγ = 1/√(β²−1)`; at `x = r` it is infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformFrame {
    pub beta: f64,
    pub gamma: f64,
    pub xi: f64,
    /// `u = 1 − β²`.
    pub u: f64,
    /// `3S(u)`.
    pub three_s: f64,
}

impl UniformFrame {
    /// True on the oscillatory side `x < r`.
    pub fn below_turning_point(&self) -> bool {
        self.u > 0.0
    }
}

fn three_s(t: &CoefficientTables, u: f64, beta: f64) -> f64 {
    if fabs(u) < SERIES_U {
        poly_eval(t.three_s_series(), u)
    } else if u > 0.0 {
        let q = sqrt(u);
        3.0 * (log((1.0 + q) / beta) - q) / (u * q)
    } else {
        let a = sqrt(-u);
        3.0 * (a - atan(a)) / (-u * a)
    }
}

/// Frame variables `β`, `γ` (or `−iγ`), `ξ` at `(r, x)`; requires `r > 0`.
pub fn uniform_frame(args: BesselArgs) -> Result<UniformFrame> {
    if !(args.r > 0.0) {
        return Err(Error::Domain(alloc::format!("uniform frame needs r > 0, got r={}", args.r)));
    }
    Ok(frame_with(tables(), args))
}

fn frame_with(t: &CoefficientTables, args: BesselArgs) -> UniformFrame {
    let beta = args.x / args.r;
    // 1 − β² without cancellation near β = 1
    let u = (1.0 - beta) * (1.0 + beta);
    let s3 = three_s(t, u, beta);
    let xi = -pow(args.r, 2.0 / 3.0) * u * pow(s3, 2.0 / 3.0) / (CBRT2 * CBRT2);
    let gamma = if u == 0.0 { f64::INFINITY } else { 1.0 / sqrt(fabs(u)) };
    UniformFrame { beta, gamma, xi, u, three_s: s3 }
}

/// A scaled K-Bessel value with an error estimate and the evaluator used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselResult {
    pub value: f64,
    pub est_error: f64,
    pub regime: Regime,
}

fn check_terms(k_max: usize, limit: usize) -> Result<()> {
    if k_max == 0 || k_max > limit {
        return Err(Error::Table { index: k_max, depth: limit });
    }
    Ok(())
}

/// Sums `Σ_{k<k_max} A_k r^{−2k}` and `Σ_{k<k_max} B̂_k r^{−2k−4/3}`, the
/// first omitted pair, and a rounding bound.
struct SeriesSums {
    a: f64,
    b: f64,
    a_next: f64,
    b_next: f64,
    a_round: f64,
    b_round: f64,
}

fn direct_sums(t: &CoefficientTables, frame: &UniformFrame, r: f64, k_max: usize) -> SeriesSums {
    let u = frame.u;
    let two_over = 2.0 / frame.three_s;
    let inv_cbrt = 1.0 / cbrt(frame.three_s);
    let inv_u = 1.0 / u;
    let mut inv_pows = [1.0f64; 3 * TURNING_TERMS + 3];
    for e in 1..inv_pows.len() {
        inv_pows[e] = inv_pows[e - 1] * inv_u;
    }
    let r2 = 1.0 / (r * r);
    let r43 = pow(r, -4.0 / 3.0);
    let mut out = SeriesSums { a: 0.0, b: 0.0, a_next: 0.0, b_next: 0.0, a_round: 0.0, b_round: 0.0 };
    let mut rk = 1.0;
    for k in 0..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (mut ak, mut ak_abs) = (0.0, 0.0);
        let mut scale = 1.0;
        for s in 0..=2 * k {
            for (l, c) in t.u_coeffs(2 * k - s).iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let term = t.mu_f(s) * scale * c * inv_pows[(3 * s + l) / 2];
                ak += term;
                ak_abs += fabs(term);
            }
            scale *= two_over;
        }
        let (mut bk, mut bk_abs) = (0.0, 0.0);
        let mut scale = inv_cbrt;
        for s in 0..=2 * k + 1 {
            for (l, c) in t.u_coeffs(2 * k + 1 - s).iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let term = t.lambda_f(s) * scale * c * inv_pows[(3 * s + 1 + l) / 2];
                bk += term;
                bk_abs += fabs(term);
            }
            scale *= two_over;
        }
        let ak = sign * ak * rk;
        let bk = -sign * bk * rk * r43;
        if k < k_max {
            out.a += ak;
            out.b += bk;
            out.a_round += EPS_MACH * ak_abs * rk;
            out.b_round += EPS_MACH * bk_abs * rk * r43;
        } else {
            out.a_next = ak;
            out.b_next = bk;
        }
        rk *= r2;
    }
    out
}

fn turning_sums(t: &CoefficientTables, u: f64, r: f64, k_max: usize) -> SeriesSums {
    let r2 = 1.0 / (r * r);
    let r43 = pow(r, -4.0 / 3.0);
    let mut out = SeriesSums { a: 0.0, b: 0.0, a_next: 0.0, b_next: 0.0, a_round: 0.0, b_round: 0.0 };
    let tail = pow(fabs(u), TAYLOR_ORDER as f64);
    let mut rk = 1.0;
    for k in 0..=k_max {
        let ca = t.turning_a(k);
        let cb = t.turning_b(k);
        let ak = poly_eval(ca, u) * rk;
        let bk = poly_eval(cb, u) * rk * r43;
        if k < k_max {
            out.a += ak;
            out.b += bk;
            // rounding plus the size of the last retained Taylor term
            out.a_round += (EPS_MACH * poly_abs_eval(ca, u) + fabs(ca[TAYLOR_ORDER]) * tail) * rk;
            out.b_round += (EPS_MACH * poly_abs_eval(cb, u) + fabs(cb[TAYLOR_ORDER]) * tail) * rk * r43;
        } else {
            out.a_next = ak;
            out.b_next = bk;
        }
        rk *= r2;
    }
    out
}

fn assemble(frame: &UniformFrame, r: f64, sums: &SeriesSums, regime: Regime) -> BesselResult {
    let (ai, aip) = airy_pair(frame.xi);
    let pre = CBRT2 * PI * pow(frame.three_s, 1.0 / 6.0) / cbrt(r);
    let value = pre * (ai * sums.a + CBRT2 * aip * sums.b);
    let truncation = pre * (fabs(ai * sums.a_next) + CBRT2 * fabs(aip * sums.b_next));
    let rounding = pre * (fabs(ai) * sums.a_round + CBRT2 * fabs(aip) * sums.b_round)
        + EPS_MACH * 8.0 * fabs(value);
    BesselResult { value, est_error: truncation + rounding, regime }
}

/// Uniform expansion with `k_max` terms in each series, summed from `λ_s`, `u_k`.
pub fn eval_uniform(args: BesselArgs, frame: &UniformFrame, k_max: usize) -> Result<BesselResult> {
    eval_uniform_with(tables(), DEFAULT_WINDOW, args, frame, k_max)
}

fn eval_uniform_with(
    t: &CoefficientTables,
    window: f64,
    args: BesselArgs,
    frame: &UniformFrame,
    k_max: usize,
) -> Result<BesselResult> {
    check_terms(k_max, TURNING_TERMS - 1)?;
    if in_window(window, args) || frame.u == 0.0 {
        return Err(Error::Regime { regime: Regime::Uniform, r: args.r, x: args.x });
    }
    let sums = direct_sums(t, frame, args.r, k_max);
    Ok(assemble(frame, args.r, &sums, Regime::Uniform))
}

/// Uniform expansion near `x = r`, with `A_k`, `B_k` taken from their Taylor
/// series about the turning point.
pub fn eval_transitional(args: BesselArgs, k_max: usize) -> Result<BesselResult> {
    eval_transitional_with(tables(), args, k_max)
}

fn eval_transitional_with(t: &CoefficientTables, args: BesselArgs, k_max: usize) -> Result<BesselResult> {
    check_terms(k_max, TURNING_TERMS - 1)?;
    if !(args.r > 0.0) {
        return Err(Error::Regime { regime: Regime::Transitional, r: args.r, x: args.x });
    }
    let frame = frame_with(t, args);
    if fabs(frame.u) > TURNING_U_MAX {
        return Err(Error::Regime { regime: Regime::Transitional, r: args.r, x: args.x });
    }
    let sums = turning_sums(t, frame.u, args.r, k_max);
    Ok(assemble(&frame, args.r, &sums, Regime::Transitional))
}

/// Hankel series for `x < r`: `√(2πγ/r) [sin φ Σ(−1)^k u_{2k}(γ)/r^{2k} + cos φ Σ(−1)^k u_{2k+1}(γ)/r^{2k+1}]`.
pub fn eval_hankel(args: BesselArgs, frame: &UniformFrame, k_max: usize) -> Result<BesselResult> {
    eval_hankel_with(tables(), args, frame, k_max)
}

fn eval_hankel_with(
    t: &CoefficientTables,
    args: BesselArgs,
    frame: &UniformFrame,
    k_max: usize,
) -> Result<BesselResult> {
    check_terms(k_max, (super::tables::TABLE_DEPTH - 1) / 2)?;
    if !(frame.u > 0.0) {
        return Err(Error::Regime { regime: Regime::Hankel, r: args.r, x: args.x });
    }
    let r = args.r;
    let g = frame.gamma;
    // (2/3)(−ξ)^{3/2} = r (artanh q − q) = r u^{3/2} (3S)/3
    let phase = r * frame.u * sqrt(frame.u) * frame.three_s / 3.0 + PI / 4.0;
    let (mut even, mut odd) = (0.0, 0.0);
    let (mut even_abs, mut odd_abs) = (0.0, 0.0);
    let mut rk = 1.0;
    for k in 0..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let te = sign * t.u_eval(2 * k, g) * rk;
        let to = sign * t.u_eval(2 * k + 1, g) * rk / r;
        if k < k_max {
            even += te;
            odd += to;
            even_abs += poly_abs_eval(t.u_coeffs(2 * k), g) * rk;
            odd_abs += poly_abs_eval(t.u_coeffs(2 * k + 1), g) * rk / r;
        } else {
            let amp = sqrt(2.0 * PI * g / r);
            let value = amp * (sin(phase) * even + cos(phase) * odd);
            let rounding = amp * EPS_MACH * (even_abs + odd_abs + phase * (fabs(even) + fabs(odd)));
            return Ok(BesselResult {
                value,
                est_error: amp * (fabs(te) + fabs(to)) + rounding,
                regime: Regime::Hankel,
            });
        }
        rk /= r * r;
    }
    unreachable!()
}

/// Debye series for `x > r`: `√(2πg/r) · ½ e^{−ζ} Σ (−1)^k ũ_k(g)/r^k` with `g = −iγ`.
pub fn eval_debye(args: BesselArgs, frame: &UniformFrame, k_max: usize) -> Result<BesselResult> {
    eval_debye_with(tables(), args, frame, k_max)
}

fn eval_debye_with(
    t: &CoefficientTables,
    args: BesselArgs,
    frame: &UniformFrame,
    k_max: usize,
) -> Result<BesselResult> {
    check_terms(k_max, super::tables::TABLE_DEPTH - 1)?;
    if !(frame.u < 0.0) {
        return Err(Error::Regime { regime: Regime::Debye, r: args.r, x: args.x });
    }
    let r = args.r;
    let g = frame.gamma;
    let a = sqrt(-frame.u);
    // (2/3)ξ^{3/2} = r (a − arctan a) = r a³ (3S)/3
    let zeta = r * a * a * a * frame.three_s / 3.0;
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut rk = 1.0;
    for k in 0..=k_max {
        let term = t.u_tilde_eval(k, g) * rk;
        if k < k_max {
            sum += term;
            sum_abs += fabs(term);
        } else {
            let amp = 0.5 * sqrt(2.0 * PI * g / r) * exp(-zeta);
            let value = amp * sum;
            return Ok(BesselResult {
                value,
                est_error: amp * (fabs(term) + EPS_MACH * (sum_abs + zeta * fabs(sum))),
                regime: Regime::Debye,
            });
        }
        // ũ_k enter with alternating sign
        rk /= -r;
    }
    unreachable!()
}

/// Default half-width constant `c` of the turning-point window `|x − r| ≤ c r^{1/3}`.
pub const DEFAULT_WINDOW: f64 = 1.5;
/// Orders below this go to the quadrature.
pub const DEFAULT_QUADRATURE_BELOW: f64 = 50.0;
/// Terms per series used by the regime selector.
pub const DEFAULT_TERMS: usize = 5;

fn in_window(window: f64, args: BesselArgs) -> bool {
    fabs(args.x - args.r) <= window * cbrt(args.r)
}

/// Regime-selecting evaluator of `e^{πr/2} K_{ir}(x)`.
#[derive(Debug, Clone, Copy)]
pub struct BesselEvaluator {
    tables: &'static CoefficientTables,
    /// Window constant `c` for the transitional evaluator.
    pub window: f64,
    /// Orders below this are integrated numerically.
    pub quadrature_below: f64,
    /// Terms per asymptotic series.
    pub terms: usize,
}

impl core::fmt::Debug for CoefficientTables {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("CoefficientTables { .. }")
    }
}

impl Default for BesselEvaluator {
    fn default() -> Self {
        BesselEvaluator {
            tables: tables(),
            window: DEFAULT_WINDOW,
            quadrature_below: DEFAULT_QUADRATURE_BELOW,
            terms: DEFAULT_TERMS,
        }
    }
}

impl BesselEvaluator {
    /// `e^{πr/2} K_{ir}(x)` to roughly `target` absolute accuracy.
    ///
    /// An unreachable target is not an error: the result then carries an
    /// `est_error` above it.
    pub fn k_scaled(&self, r: f64, x: f64, target: f64) -> Result<BesselResult> {
        let args = BesselArgs::new(r, x)?;
        let target = target.max(1e-15);
        if args.r < self.quadrature_below {
            let q = quadrature::quadrature_best_effort(args.r, args.x, target)?;
            return Ok(BesselResult { value: q.value, est_error: q.error, regime: Regime::Quadrature });
        }
        if in_window(self.window, args) {
            return eval_transitional_with(self.tables, args, self.terms);
        }
        let frame = frame_with(self.tables, args);
        let shortcut = if frame.u > 0.0 {
            eval_hankel_with(self.tables, args, &frame, self.terms)?
        } else {
            eval_debye_with(self.tables, args, &frame, self.terms)?
        };
        if shortcut.est_error <= 1e-2 * target {
            return Ok(shortcut);
        }
        eval_uniform_with(self.tables, self.window, args, &frame, self.terms)
    }

    /// Value only; see [`BesselEvaluator::k_scaled`].
    pub fn value(&self, r: f64, x: f64, target: f64) -> Result<f64> {
        self.k_scaled(r, x, target).map(|b| b.value)
    }

    /// Estimate of `max_x e^{πr/2}|K_{ir}(x)|`; the maximum sits just below the
    /// turning point, near `x ≈ r − 0.81 r^{1/3}` for large `r`.
    pub fn peak(&self, r: f64) -> f64 {
        let r = fabs(r);
        let c = cbrt(r.max(1e-300));
        let lo = (r - 5.0 * c).max(1e-3 * r.max(1e-3));
        let hi = r + 2.0 * c;
        let f = |x: f64| self.value(r, x, 1e-12).map(fabs).unwrap_or(0.0);
        const SCAN: usize = 96;
        let step = (hi - lo) / SCAN as f64;
        let mut best_x = r;
        let mut best = f(r);
        if r >= self.quadrature_below {
            // leading transitional term at the turning point
            best = best.max(CBRT2 * PI * AI_ZERO / c * 0.0 + f(r));
        }
        for i in 0..=SCAN {
            let x = lo + step * i as f64;
            let v = f(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        // golden-section refinement inside the best cell
        let (mut a, mut b) = ((best_x - step).max(lo * 0.5), best_x + step);
        let g = 0.5 * (sqrt(5.0) - 1.0);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..60 {
            if f1 > f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
            if b - a < 1e-10 * (1.0 + r) {
                break;
            }
        }
        best.max(f1).max(f2)
    }
}

/// `e^{πr/2} K_{ir}(x)` with the default evaluator.
pub fn k_bessel_scaled(args: BesselArgs, target_accuracy: f64) -> Result<BesselResult> {
    BesselEvaluator::default().k_scaled(args.r, args.x, target_accuracy)
}

/// Quadrature oracle for `e^{πr/2} K_{ir}(x)`.
pub fn k_bessel_quadrature(args: BesselArgs, tol: f64) -> Result<f64> {
    quadrature::k_bessel_quadrature(args.r, args.x, tol)
}

/// Estimate of `max_x e^{πr/2}|K_{ir}(x)|`.
pub fn k_bessel_peak(r: f64) -> f64 {
    BesselEvaluator::default().peak(r)
}
