//! Exact coefficient tables for the large-order K-Bessel expansions.
//!
//! Everything here is built once from exact rational arithmetic and then
//! frozen: the constants `λ_s`, the Debye polynomials `u_k(t)`, and the Taylor
//! series (in `u = 1 − (x/r)²`) of the uniform-expansion coefficient functions
//! `A_k`, `B_k` around the turning point.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::race::OnceBox;

use crate::error::{Error, Result};

/// Highest index stored for `λ_s` and `u_k`.
pub const TABLE_DEPTH: usize = 11;

/// Number of uniform-expansion terms kept in the turning-point Taylor tables
/// (`A_0..A_5`, `B_0..B_5`; the last pair feeds the error estimate).
pub const TURNING_TERMS: usize = 6;

/// Order of the Taylor polynomials in `u` used near the turning point.
pub const TAYLOR_ORDER: usize = 48;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// `λ_0 = 1`, `λ_s = (6s−5)(6s−1)/(48s) · λ_{s−1}`.
fn build_lambda(depth: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(depth + 1);
    out.push(Q::one());
    for s in 1..=depth as i64 {
        let prev = out[(s - 1) as usize].clone();
        out.push(prev * q((6 * s - 5) * (6 * s - 1), 48 * s));
    }
    out
}

/// `u_0 = 1`, `u_{k+1}(t) = ½t²(1−t²)u_k'(t) + ⅛∫₀ᵗ(1−5τ²)u_k(τ)dτ`.
fn build_u_polys(depth: usize) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::with_capacity(depth + 1);
    out.push(vec![Q::one()]);
    for k in 0..depth {
        let cur = &out[k];
        let mut next = vec![Q::zero(); cur.len() + 3];
        for (j, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let jj = j as i64;
            if j > 0 {
                let half_j = c * q(jj, 2);
                next[j + 1] += &half_j;
                next[j + 3] -= &half_j;
            }
            next[j + 1] += c * q(1, 8 * (jj + 1));
            next[j + 3] -= c * q(5, 8 * (jj + 3));
        }
        while next.last().is_some_and(|c| c.is_zero()) {
            next.pop();
        }
        out.push(next);
    }
    out
}

fn series_mul(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `G^p` for a power series with `G_0 = 1`, by the J. C. P. Miller recurrence.
fn series_pow(g: &[Q], p: &Q, len: usize) -> Vec<Q> {
    debug_assert!(g[0].is_one());
    let mut f = vec![Q::zero(); len];
    f[0] = Q::one();
    let p1 = p + Q::one();
    for n in 1..len {
        let mut acc = Q::zero();
        for k in 1..=n.min(g.len() - 1) {
            if g[k].is_zero() {
                continue;
            }
            let w = &p1 * Q::from_integer(BigInt::from(k as i64)) - Q::from_integer(BigInt::from(n as i64));
            acc += w * &g[k] * &f[n - k];
        }
        f[n] = acc / Q::from_integer(BigInt::from(n as i64));
    }
    f
}

/// `3S(u) = Σ_j 3u^j/(2j+3)`, where `(2/3)(−w)^{3/2} = artanh q − q = q³S(q²)`.
fn three_s_series(len: usize) -> Vec<Q> {
    (0..len as i64).map(|j| q(3, 2 * j + 3)).collect()
}

fn pow2(s: usize) -> Q {
    Q::from_integer(BigInt::one() << s)
}

/// Taylor coefficients of `A_k(u)` and `B_k(u)/2^{1/3}` around `u = 0`, plus the
/// (exactly vanishing) Laurent parts, which are kept for verification.
struct TurningSeries {
    a: Vec<Vec<Q>>,
    b: Vec<Vec<Q>>,
    a_principal: Vec<Vec<Q>>,
    b_principal: Vec<Vec<Q>>,
}

fn build_turning_series(lambda: &[Q], u_polys: &[Vec<Q>], terms: usize, order: usize) -> TurningSeries {
    let max_shift = 3 * (terms - 1) + 2;
    let len = order + max_shift + 1;
    let g = three_s_series(len);
    let inv = series_pow(&g, &q(-1, 1), len);
    let inv_cbrt = series_pow(&g, &q(-1, 3), len);
    let max_s = 2 * (terms - 1) + 1;
    let mut p_pows: Vec<Vec<Q>> = Vec::with_capacity(max_s + 1);
    p_pows.push({
        let mut one = vec![Q::zero(); len];
        one[0] = Q::one();
        one
    });
    for s in 1..=max_s {
        let next = series_mul(&p_pows[s - 1], &inv, len);
        p_pows.push(next);
    }
    let r_pows: Vec<Vec<Q>> = p_pows.iter().map(|p| series_mul(p, &inv_cbrt, len)).collect();

    let mu: Vec<Q> = lambda
        .iter()
        .enumerate()
        .map(|(s, l)| {
            let s = s as i64;
            l * q(1 + 6 * s, 1 - 6 * s)
        })
        .collect();

    let mut a_out = Vec::with_capacity(terms);
    let mut b_out = Vec::with_capacity(terms);
    let mut a_pr = Vec::with_capacity(terms);
    let mut b_pr = Vec::with_capacity(terms);
    for k in 0..terms {
        // A_k = (−1)^k Σ_s μ_s 2^s (3S)^{−s} Σ_l c_{2k−s,l} u^{−(3s+l)/2}
        let mut taylor = vec![Q::zero(); order + 1];
        let mut principal = vec![Q::zero(); 3 * k + 1];
        let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
        for s in 0..=2 * k {
            let factor = &sign * &mu[s] * pow2(s);
            for (l, c) in u_polys[2 * k - s].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let shift = (3 * s + l) / 2;
                let coeff = &factor * c;
                accumulate(&mut taylor, &mut principal, &p_pows[s], &coeff, shift);
            }
        }
        a_out.push(taylor);
        a_pr.push(principal);

        // B_k / 2^{1/3} = (−1)^{k+1} Σ_s λ_s 2^s (3S)^{−s−1/3} Σ_l c_{2k+1−s,l} u^{−(3s+1+l)/2}
        let mut taylor = vec![Q::zero(); order + 1];
        let mut principal = vec![Q::zero(); 3 * k + 3];
        let sign = -sign;
        for s in 0..=2 * k + 1 {
            let factor = &sign * &lambda[s] * pow2(s);
            for (l, c) in u_polys[2 * k + 1 - s].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let shift = (3 * s + 1 + l) / 2;
                let coeff = &factor * c;
                accumulate(&mut taylor, &mut principal, &r_pows[s], &coeff, shift);
            }
        }
        b_out.push(taylor);
        b_pr.push(principal);
    }
    TurningSeries { a: a_out, b: b_out, a_principal: a_pr, b_principal: b_pr }
}

/// Adds `coeff · u^{−shift} · series` into a Taylor part and a principal part
/// (`principal[j]` holds the coefficient of `u^{−j}`).
fn accumulate(taylor: &mut [Q], principal: &mut [Q], series: &[Q], coeff: &Q, shift: usize) {
    for (i, s) in series.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        if i >= shift {
            let n = i - shift;
            if n < taylor.len() {
                taylor[n] += coeff * s;
            }
        } else {
            principal[shift - i] += coeff * s;
        }
    }
}

/// Coefficient tables shared by all K-Bessel evaluators.
pub struct CoefficientTables {
    lambda: Vec<Q>,
    u_polys: Vec<Vec<Q>>,
    lambda_f: Vec<f64>,
    mu_f: Vec<f64>,
    u_f: Vec<Vec<f64>>,
    /// `ũ_k(g) = (−i)^k u_k(i g)`, real polynomials used on the `x > r` side.
    u_tilde_f: Vec<Vec<f64>>,
    turning_a: Vec<Vec<f64>>,
    turning_b: Vec<Vec<f64>>,
    turning_principal_zero: bool,
    /// Series of `3S(u)`.
    three_s: Vec<f64>,
}

impl CoefficientTables {
    pub fn build() -> Self {
        let lambda = build_lambda(TABLE_DEPTH);
        let u_polys = build_u_polys(TABLE_DEPTH);
        let turning = build_turning_series(&lambda, &u_polys, TURNING_TERMS, TAYLOR_ORDER);
        let turning_principal_zero = turning
            .a_principal
            .iter()
            .chain(turning.b_principal.iter())
            .all(|p| p.iter().all(Zero::is_zero));

        let lambda_f: Vec<f64> = lambda.iter().map(to_f64).collect();
        let mu_f: Vec<f64> = lambda
            .iter()
            .enumerate()
            .map(|(s, l)| {
                let s = s as i64;
                to_f64(&(l * q(1 + 6 * s, 1 - 6 * s)))
            })
            .collect();
        let u_f: Vec<Vec<f64>> = u_polys.iter().map(|p| p.iter().map(to_f64).collect()).collect();
        let u_tilde_f = u_polys
            .iter()
            .enumerate()
            .map(|(k, p)| {
                p.iter()
                    .enumerate()
                    .map(|(l, c)| {
                        if c.is_zero() {
                            return 0.0;
                        }
                        // (−i)^k i^l = i^{l−k}; l ≡ k (mod 2)
                        let sign = if ((l as i64 - k as i64) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        sign * to_f64(c)
                    })
                    .collect()
            })
            .collect();

        let len = TAYLOR_ORDER + 1;
        let g = three_s_series(len);
        let three_s = g.iter().map(to_f64).collect();

        CoefficientTables {
            turning_a: turning.a.iter().map(|s| s.iter().map(to_f64).collect()).collect(),
            turning_b: turning.b.iter().map(|s| s.iter().map(to_f64).collect()).collect(),
            lambda,
            u_polys,
            lambda_f,
            mu_f,
            u_f,
            u_tilde_f,
            turning_principal_zero,
            three_s,
        }
    }

    /// Exact `λ_s`.
    pub fn lambda(&self, s: usize) -> Result<&BigRational> {
        self.lambda.get(s).ok_or(Error::Table { index: s, depth: TABLE_DEPTH })
    }

    /// Exact coefficients of `u_k(t)`, lowest power first.
    pub fn u_poly(&self, k: usize) -> Result<&[BigRational]> {
        self.u_polys
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::Table { index: k, depth: TABLE_DEPTH })
    }

    pub(crate) fn lambda_f(&self, s: usize) -> f64 {
        self.lambda_f[s]
    }

    pub(crate) fn mu_f(&self, s: usize) -> f64 {
        self.mu_f[s]
    }

    pub(crate) fn u_coeffs(&self, k: usize) -> &[f64] {
        &self.u_f[k]
    }

    /// `u_k(t)` in floating point.
    pub fn u_eval(&self, k: usize, t: f64) -> f64 {
        poly_eval(&self.u_f[k], t)
    }

    /// `ũ_k(g)`, the real form of `(−i)^k u_k(i g)`.
    pub fn u_tilde_eval(&self, k: usize, g: f64) -> f64 {
        poly_eval(&self.u_tilde_f[k], g)
    }

    /// Taylor coefficients (in `u`) of `A_k`.
    pub fn turning_a(&self, k: usize) -> &[f64] {
        &self.turning_a[k]
    }

    /// Taylor coefficients (in `u`) of `B_k / 2^{1/3}`.
    pub fn turning_b(&self, k: usize) -> &[f64] {
        &self.turning_b[k]
    }

    /// True when every negative power cancelled exactly in the Laurent-to-Taylor
    /// conversion of `A_k`, `B_k`.
    pub fn turning_series_regular(&self) -> bool {
        self.turning_principal_zero
    }

    pub(crate) fn three_s_series(&self) -> &[f64] {
        &self.three_s
    }
}

pub(crate) fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Magnitude bound `Σ|c_j||t|^j`, used for rounding estimates.
pub(crate) fn poly_abs_eval(coeffs: &[f64], t: f64) -> f64 {
    let t = t.abs();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.abs())
}

static TABLES: OnceBox<CoefficientTables> = OnceBox::new();

/// Process-wide tables, built on first use.
pub fn tables() -> &'static CoefficientTables {
    TABLES.get_or_init(|| alloc::boxed::Box::new(CoefficientTables::build()))
}

/// Exact `λ_s` for `s ≤ TABLE_DEPTH`.
pub fn lambda_coeff(s: usize) -> Result<BigRational> {
    tables().lambda(s).cloned()
}

/// Exact coefficients of `u_k(t)` for `k ≤ TABLE_DEPTH`, lowest power first.
pub fn u_poly(k: usize) -> Result<Vec<BigRational>> {
    tables().u_poly(k).map(<[_]>::to_vec)
}

/// Degree of an exact polynomial (highest nonzero coefficient).
pub fn degree(poly: &[BigRational]) -> usize {
    poly.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// `max |c|` over a polynomial, handy for sanity checks.
pub fn max_abs_coeff(poly: &[BigRational]) -> f64 {
    poly.iter().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
}
