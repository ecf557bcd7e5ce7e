//! Geometry of the upper half-plane under PSL(2,Z).

use crate::error::{Error, Result};
use crate::math::{ceil, fabs, floor, log};

/// Lowest height `√3/2` of the fundamental domain.
pub const Y0: f64 = 0.866_025_403_784_438_6;

/// Heights below this are rejected by [`pullback`].
pub const MIN_HEIGHT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::Domain(alloc::format!("point {x}+{y}i is not in the upper half-plane")));
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn abs2(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Integer Möbius map `z ↦ (az+b)/(cz+d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MoebiusMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: 1, b: 0, c: 0, d: 1 };
    /// `S: z ↦ −1/z`.
    pub const S: MoebiusMap = MoebiusMap { a: 0, b: -1, c: 1, d: 0 };

    /// `T^k: z ↦ z + k`.
    pub fn translation(k: i64) -> Self {
        MoebiusMap { a: 1, b: k, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Equality in PSL(2,Z), i.e. up to an overall sign.
    pub fn projectively_eq(&self, other: &MoebiusMap) -> bool {
        self == other || (self.a == -other.a && self.b == -other.b && self.c == -other.c && self.d == -other.d)
    }
}

/// `(az+b)/(cz+d)`, with `y' = y/|cz+d|²`.
pub fn apply(map: &MoebiusMap, z: UpperHalfPoint) -> UpperHalfPoint {
    let (a, b, c, d) = (map.a as f64, map.b as f64, map.c as f64, map.d as f64);
    let re = c * z.x + d;
    let im = c * z.y;
    let den = re * re + im * im;
    // (az+b)(c z̄+d) / |cz+d|²
    let nr = a * z.x + b;
    let ni = a * z.y;
    UpperHalfPoint { x: (nr * re + ni * im) / den, y: z.y / den }
}

/// Membership in the closed fundamental domain `|x| ≤ 1/2`, `|z| ≥ 1`.
pub fn in_fundamental_domain(z: UpperHalfPoint) -> bool {
    fabs(z.x) <= 0.5 && z.abs2() >= 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackResult {
    pub point: UpperHalfPoint,
    /// `map` applied to the input gives `point`.
    pub map: MoebiusMap,
    pub used_inversion: bool,
}

/// Iteration cap `10 + 4⌈log₂(1/y)⌉`.
pub fn iteration_cap(y: f64) -> usize {
    let l = if y < 1.0 { ceil(log(1.0 / y) / core::f64::consts::LN_2) } else { 0.0 };
    10 + 4 * l as usize
}

/// Maps `z` into the fundamental domain by translations and inversions.
///
/// Boundary ties: `x = 1/2` is sent to `−1/2`, and points on `|z| = 1` with
/// `x > 0` are inverted, so each orbit has exactly one representative.
pub fn pullback(z: UpperHalfPoint) -> Result<PullbackResult> {
    if !(z.y >= MIN_HEIGHT) {
        return Err(Error::Geometry { x: z.x, y: z.y, iterations: 0 });
    }
    let cap = iteration_cap(z.y);
    let mut p = z;
    let mut map = MoebiusMap::IDENTITY;
    let mut used_inversion = false;
    for _ in 0..cap {
        let k = -floor(p.x + 0.5);
        if k != 0.0 {
            p.x += k;
            map = MoebiusMap::translation(k as i64).compose(&map);
        }
        if p.x == 0.5 {
            p.x = -0.5;
            map = MoebiusMap::translation(-1).compose(&map);
        }
        let r2 = p.abs2();
        if r2 < 1.0 || (r2 == 1.0 && p.x > 0.0) {
            p = UpperHalfPoint { x: -p.x / r2, y: p.y / r2 };
            map = MoebiusMap::S.compose(&map);
            used_inversion = true;
            continue;
        }
        return Ok(PullbackResult { point: p, map, used_inversion });
    }
    Err(Error::Geometry { x: z.x, y: z.y, iterations: cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(in_fundamental_domain(pt(0.0, 2.0)));
        assert!(!in_fundamental_domain(pt(0.6, 2.0)));
        assert!(!in_fundamental_domain(pt(0.3, 0.9)));
        assert!(in_fundamental_domain(pt(-0.5, Y0 + 1e-12)));
    }

    #[test]
    fn apply_examples() {
        let z = pt(0.25, 1.0);
        assert_eq!(apply(&MoebiusMap::IDENTITY, z), z);
        let w = apply(&MoebiusMap::S, pt(0.0, 1.0));
        assert!(fabs(w.x) < 1e-16 && fabs(w.y - 1.0) < 1e-16);
        assert_eq!(apply(&MoebiusMap::translation(1), z), pt(1.25, 1.0));
    }

    #[test]
    fn pullback_examples() {
        let r = pullback(pt(0.0, 2.0)).unwrap();
        assert_eq!(r.map, MoebiusMap::IDENTITY);
        assert!(!r.used_inversion);

        let r = pullback(pt(1.3, 0.9)).unwrap();
        assert!(fabs(r.point.x + 1.0 / 3.0) < 1e-14, "{:?}", r.point);
        assert!(fabs(r.point.y - 1.0) < 1e-14);
        assert!(r.map.projectively_eq(&MoebiusMap::S.compose(&MoebiusMap::translation(-1))));
    }

    #[test]
    fn rejects_tiny_heights() {
        assert!(matches!(pullback(pt(0.1, 1e-9)), Err(Error::Geometry { .. })));
    }

    #[test]
    fn boundary_tie_breaks() {
        let r = pullback(pt(0.5, 2.0)).unwrap();
        assert_eq!(r.point.x, -0.5);
        // 0.375² + (√55/8)² = 1 up to rounding; either side ends on x ≤ 0
        let r = pullback(pt(0.375, libm::sqrt(55.0) / 8.0)).unwrap();
        assert!(r.point.x <= 0.0);
        let r = pullback(pt(0.0, 1.0)).unwrap();
        assert_eq!(r.map, MoebiusMap::IDENTITY);
    }

    #[test]
    fn random_points_reach_domain_with_exact_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let z = pt(rng.gen_range(-3.0..3.0), rng.gen_range(0.001..3.0));
            let r = pullback(z).unwrap();
            assert!(in_fundamental_domain(r.point));
            assert!(r.point.y >= Y0 - 1e-12);
            assert_eq!(r.map.det(), 1);
            let w = apply(&r.map, z);
            assert!(fabs(w.x - r.point.x) < 1e-12 * (1.0 + 1.0 / z.y) && fabs(w.y - r.point.y) < 1e-12 * (1.0 + 1.0 / z.y));
            if z.y < Y0 {
                assert!(r.used_inversion);
            }
            let back = apply(&r.map.inverse(), r.point);
            assert!(fabs(back.x - z.x) < 1e-10 && fabs(back.y - z.y) < 1e-10);
            let again = pullback(r.point).unwrap();
            assert_eq!(again.map, MoebiusMap::IDENTITY);
            assert_eq!(again.point, r.point);
        }
    }

    /// All words in T^{±1}, S up to a fixed length, reduced projectively.
    fn words(len: usize) -> alloc::vec::Vec<MoebiusMap> {
        let gens = [MoebiusMap::translation(1), MoebiusMap::translation(-1), MoebiusMap::S];
        let mut all = alloc::vec![MoebiusMap::IDENTITY];
        let mut frontier = all.clone();
        for _ in 0..len {
            let mut next = alloc::vec::Vec::new();
            for w in &frontier {
                for g in &gens {
                    let m = g.compose(w);
                    if !all.iter().any(|v| v.projectively_eq(&m)) {
                        all.push(m);
                        next.push(m);
                    }
                }
            }
            frontier = next;
        }
        all
    }

    #[test]
    fn agrees_with_exhaustive_word_search() {
        let all = words(9);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..1000 {
            let z = pt(rng.gen_range(-1.0..1.0), rng.gen_range(0.05..3.0));
            let r = pullback(z).unwrap();
            // points of the orbit that land strictly inside F
            let inside: alloc::vec::Vec<_> = all
                .iter()
                .map(|m| apply(m, z))
                .filter(|w| fabs(w.x) < 0.5 - 1e-9 && w.abs2() > 1.0 + 1e-9)
                .collect();
            if let Some(w) = inside.first() {
                assert!(fabs(w.x - r.point.x) < 1e-9 && fabs(w.y - r.point.y) < 1e-9);
                checked += 1;
            }
        }
        assert!(checked > 500);
    }

    #[test]
    fn iteration_cap_grows_with_depth() {
        assert_eq!(iteration_cap(2.0), 10);
        assert_eq!(iteration_cap(0.25), 18);
    }
}
