use maass_core::hejhal::truncation_order;
use maass_core::modular_domain::Y0;
use maass_core::number_theory::{
    coefficient_bound_check, eisenstein_coeffs, hecke_residuals, ramanujan_check, sato_tate_distance, sieve,
    PrimeCoefficientSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn truncation_order_at_large_r() {
    let m0 = truncation_order(1e-7, 40000.0, Y0).unwrap();
    assert!((7321..=7469).contains(&m0), "M0 = {m0}");
}

#[test]
fn prime_counts() {
    assert_eq!(sieve(7395).len(), 939);
    assert_eq!(sieve(7393).len(), 939);
    assert_eq!(sieve(7392).len(), 938);
    assert_eq!(sieve(100_000).len(), 9592);
}

#[test]
fn eisenstein_coefficients_are_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let r: f64 = rng.gen_range(1.0..2000.0);
        let a = eisenstein_coeffs(r, 1000).unwrap();
        let h = hecke_residuals(&a.a);
        assert!(h.max_residual <= 1e-12, "r={r}: {:e} at {:?}", h.max_residual, h.worst_triple);
        assert!(ramanujan_check(&a.a).violations.is_empty());
        assert!(coefficient_bound_check(&a.a).worst_ratio <= 1.0 + 1e-12);
    }
}

#[test]
fn eisenstein_primes_are_not_semicircular() {
    // a_p = 2cos(r log p) follows the arcsine law, which KS separates from the semicircle
    let a = eisenstein_coeffs(1000.0, 20000).unwrap();
    let d = sato_tate_distance(&PrimeCoefficientSet::from_coefficients(&a.a)).unwrap();
    assert!(d > 0.1, "{d}");
}
