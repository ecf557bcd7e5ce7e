//! Airy function `Ai` and its derivative for real argument.
//!
//! `|x| ≥ 9` uses the classical asymptotic expansions. Inside, values come
//! from Taylor stepping of `y'' = xy`: leftwards from the exact values at 0
//! (stable, the solution oscillates) and leftwards from the asymptotic values
//! at `x = 9` for positive arguments, which is the stable direction for the
//! recessive solution.

use crate::math::{cos, exp, pow, sin, sqrt, PI};

/// `Ai(0) = 1 / (3^{2/3} Γ(2/3))`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_2;
/// `Ai'(0) = −1 / (3^{1/3} Γ(1/3))`.
pub const AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_8;

const ASYMPTOTIC_CUTOFF: f64 = 9.0;
const STEP: f64 = 0.75;

/// `Ai(x)`.
pub fn airy_ai(x: f64) -> f64 {
    airy_pair(x).0
}

/// `Ai'(x)`.
pub fn airy_ai_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// `(Ai(x), Ai'(x))` evaluated together.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x >= ASYMPTOTIC_CUTOFF {
        asymptotic_positive(x)
    } else if x <= -ASYMPTOTIC_CUTOFF {
        asymptotic_negative(-x)
    } else if x >= 0.0 && x <= 1.0 {
        taylor_step(0.0, AI_ZERO, AI_PRIME_ZERO, x)
    } else if x > 1.0 {
        let (a, ap) = asymptotic_positive(ASYMPTOTIC_CUTOFF);
        walk(ASYMPTOTIC_CUTOFF, a, ap, x)
    } else {
        walk(0.0, AI_ZERO, AI_PRIME_ZERO, x)
    }
}

fn walk(mut x0: f64, mut y: f64, mut yp: f64, target: f64) -> (f64, f64) {
    let dir = if target > x0 { 1.0 } else { -1.0 };
    while (target - x0) * dir > STEP {
        let next = x0 + dir * STEP;
        let (a, b) = taylor_step(x0, y, yp, next);
        x0 = next;
        y = a;
        yp = b;
    }
    taylor_step(x0, y, yp, target)
}

/// One Taylor step of `y'' = xy` from `x0` to `x1`.
fn taylor_step(x0: f64, y0: f64, yp0: f64, x1: f64) -> (f64, f64) {
    let h = x1 - x0;
    if h == 0.0 {
        return (y0, yp0);
    }
    // a_{n+2} = (x0 a_n + a_{n−1}) / ((n+2)(n+1)), in powers of h
    let mut a_prev = 0.0; // a_{n-1}
    let mut a_n = y0;
    let mut a_n1 = yp0 * h; // scaled: b_n = a_n h^n
    let mut value = a_n + a_n1;
    let mut deriv = yp0; // Σ n a_n h^{n-1}
    let h2 = h * h;
    let h3 = h2 * h;
    let mut small = 0;
    for n in 0..200usize {
        let nf = n as f64;
        let next = (x0 * a_n * h2 + a_prev * h3) / ((nf + 2.0) * (nf + 1.0));
        value += next;
        deriv += (nf + 2.0) * next / h;
        a_prev = a_n;
        a_n = a_n1;
        a_n1 = next;
        let scale = value.abs().max(deriv.abs()).max(1e-300);
        if next.abs() * (nf + 3.0) <= 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (value, deriv)
}

/// `u_k = (2k+1)(2k+3)⋯(6k−1) / (216^k k!)`; `v_k = −(6k+1)/(6k−1) u_k`.
fn airy_uk(k: usize) -> f64 {
    let mut u = 1.0;
    for j in 1..=k {
        let j = j as f64;
        u *= (6.0 * j - 5.0) * (6.0 * j - 3.0) * (6.0 * j - 1.0) / ((2.0 * j - 1.0) * 216.0 * j);
    }
    u
}

fn airy_vk(k: usize) -> f64 {
    let kf = k as f64;
    -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * airy_uk(k)
}

const MAX_ASYMPTOTIC_TERMS: usize = 40;

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * sqrt(x);
    let (su, sv) = alternating_sums(zeta);
    let e = exp(-zeta);
    let x4 = pow(x, 0.25);
    let ai = e / (2.0 * sqrt(PI) * x4) * su;
    let aip = -x4 * e / (2.0 * sqrt(PI)) * sv;
    (ai, aip)
}

/// `Σ(−1)^k u_k ζ^{−k}` and `Σ(−1)^k v_k ζ^{−k}`, truncated at the smallest term.
fn alternating_sums(zeta: f64) -> (f64, f64) {
    let mut su = 0.0;
    let mut sv = 0.0;
    let mut last_u = f64::INFINITY;
    let mut last_v = f64::INFINITY;
    let mut pw = 1.0;
    for k in 0..MAX_ASYMPTOTIC_TERMS {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let tu = airy_uk(k) * pw;
        let tv = airy_vk(k) * pw;
        if tu.abs() > last_u || tv.abs() > last_v {
            break;
        }
        su += sign * tu;
        sv += sign * tv;
        last_u = tu.abs();
        last_v = tv.abs();
        if last_u < 1e-17 * su.abs() && last_v < 1e-17 * sv.abs() {
            break;
        }
        pw /= zeta;
    }
    (su, sv)
}

/// `Ai(−z)`, `Ai'(−z)` for large `z > 0` (modulus/phase form).
fn asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * sqrt(z);
    // P = Σ(−1)^k u_{2k} ζ^{−2k}, Q = Σ(−1)^k u_{2k+1} ζ^{−2k−1}, same for v
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    let mut last = f64::INFINITY;
    let mut pw = 1.0;
    for k in 0..MAX_ASYMPTOTIC_TERMS {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let tu = airy_uk(k) * pw;
        let tv = airy_vk(k) * pw;
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        if k % 2 == 0 {
            pu += sign * tu;
            pv += sign * tv;
        } else {
            qu += sign * tu;
            qv += sign * tv;
        }
        last = mag;
        if mag < 1e-18 {
            break;
        }
        pw /= zeta;
    }
    let phase = zeta + PI / 4.0;
    let (s, c) = (sin(phase), cos(phase));
    let z4 = pow(z, 0.25);
    let ai = (s * pu - c * qu) / (sqrt(PI) * z4);
    let aip = -z4 * (c * pv + s * qv) / sqrt(PI);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series of `Ai`, `Ai'` from the two standard solutions.
    fn maclaurin(x: f64) -> (f64, f64) {
        // f = Σ 3^k (1/3)_k x^{3k}/(3k)!, g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!
        let (mut f, mut g, mut fp, mut gp) = (0.0, 0.0, 0.0, 0.0);
        let mut tf = 1.0; // x^{3k}/(3k)! * 3^k (1/3)_k
        let mut tg = x; // x^{3k+1}/(3k+1)! * 3^k (2/3)_k
        for k in 0..120 {
            let kf = k as f64;
            f += tf;
            g += tg;
            if k > 0 {
                fp += tf * 3.0 * kf / x;
            }
            gp += tg * (3.0 * kf + 1.0) / x;
            tf *= 3.0 * (kf + 1.0 / 3.0) * x * x * x / ((3.0 * kf + 1.0) * (3.0 * kf + 2.0) * (3.0 * kf + 3.0));
            tg *= 3.0 * (kf + 2.0 / 3.0) * x * x * x / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        }
        (AI_ZERO * f + AI_PRIME_ZERO * g, AI_ZERO * fp + AI_PRIME_ZERO * gp)
    }

    #[test]
    fn values_at_zero() {
        assert!((airy_ai(0.0) - 0.355_028_053_9).abs() < 1e-10);
        assert!((airy_ai_prime(0.0) + 0.258_819_403_8).abs() < 1e-10);
    }

    #[test]
    fn matches_maclaurin_on_moderate_range() {
        let mut x = -4.03;
        while x <= 3.0 {
            let (a, ap) = airy_pair(x);
            let (ea, eap) = maclaurin(x);
            assert!((a - ea).abs() < 1e-12, "Ai({x}) = {a} vs {ea}");
            assert!((ap - eap).abs() < 1e-12, "Ai'({x}) = {ap} vs {eap}");
            x += 0.0625;
        }
    }

    #[test]
    fn first_zeros() {
        // a_1, a'_1 from DLMF table 9.9.1
        assert!(airy_ai(-2.338_107_410_459_767).abs() < 1e-13);
        assert!(airy_ai_prime(-1.018_792_971_647_471).abs() < 1e-13);
    }

    #[test]
    fn continuous_across_cutoffs() {
        for &c in &[ASYMPTOTIC_CUTOFF, -ASYMPTOTIC_CUTOFF, 1.0] {
            let lo = airy_pair(c - 1e-14);
            let hi = airy_pair(c + 1e-14);
            assert!((lo.0 - hi.0).abs() < 1e-13, "Ai jump at {c}");
            assert!((lo.1 - hi.1).abs() < 1e-12, "Ai' jump at {c}");
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        let mut x = -19.5;
        while x < 19.5 {
            let ypp = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
            let scale = airy_ai(x).abs().max(airy_ai_prime(x).abs()) * (1.0 + x.abs());
            assert!((ypp - x * airy_ai(x)).abs() < 1e-5 * scale + 1e-12, "x={x}");
            x += 0.37;
        }
    }

    #[test]
    fn decays_monotonically_for_positive_argument() {
        let mut prev = airy_ai(0.0);
        let mut x = 0.25;
        while x < 30.0 {
            let v = airy_ai(x);
            assert!(v > 0.0 && v < prev);
            prev = v;
            x += 0.25;
        }
    }
}
