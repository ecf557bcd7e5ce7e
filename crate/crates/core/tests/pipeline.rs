use maass_core::hejhal::{Hejhal, Symmetry};
use maass_core::modular_domain::{apply, MoebiusMap, UpperHalfPoint, Y0};
use maass_core::parallel::Serial;
use maass_core::search::{gate_failure, search_interval, EigenvalueRecord, Gates, SearchConfig};
use maass_core::special_functions::BesselEvaluator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hejhal() -> Hejhal<Serial> {
    Hejhal::new(BesselEvaluator::default(), Serial)
}

fn find(r_min: f64, r_max: f64, symmetry: Symmetry) -> Vec<EigenvalueRecord> {
    search_interval(&hejhal(), r_min, r_max, symmetry, &SearchConfig::default(), &mut ()).unwrap().eigenvalues
}

/// Known values of the first odd and even eigenvalues.
const FIRST_ODD: f64 = 9.533_695_261_35;
const FIRST_EVEN: f64 = 13.779_751_351_89;

fn check_record(rec: &EigenvalueRecord, near: f64) {
    assert!((rec.r - near).abs() < 1e-9, "r = {}", rec.r);
    assert_eq!(gate_failure(rec, &Gates::default()), None);
    assert!(rec.hecke_max_residual <= 1e-6);
    assert!(rec.y_consistency_max_delta <= 1e-5);
    assert!(rec.verification.ramanujan_max_abs <= 2.0 + 1e-6);
    assert!(rec.verification.bound_worst_ratio <= 1.0 + 1e-12);
    assert_eq!(rec.coefficients[0], 1.0);
    assert!(rec.verification.trisection_width <= 1e-11 * rec.r);
}

#[test]
fn first_odd_eigenvalue() {
    let found = find(9.0, 10.5, Symmetry::Odd);
    assert_eq!(found.len(), 1);
    check_record(&found[0], FIRST_ODD);
}

#[test]
fn first_even_eigenvalue() {
    let found = find(13.0, 14.5, Symmetry::Even);
    assert_eq!(found.len(), 1);
    check_record(&found[0], FIRST_EVEN);
}

#[test]
fn nothing_below_the_first_eigenvalue() {
    for sym in [Symmetry::Even, Symmetry::Odd] {
        let report = search_interval(&hejhal(), 1.0, 5.0, sym, &SearchConfig::default(), &mut ()).unwrap();
        assert!(report.eigenvalues.is_empty(), "{sym}: {:?}", report.eigenvalues);
    }
}

#[test]
fn reruns_are_identical() {
    let a = find(9.0, 10.5, Symmetry::Odd);
    let b = find(9.0, 10.5, Symmetry::Odd);
    assert_eq!(a, b);
    assert_eq!(a[0].r.to_bits(), b[0].r.to_bits());
}

#[test]
fn reconstructed_forms_are_automorphic() {
    let h = hejhal();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (lo, hi, sym) in [(9.0, 10.5, Symmetry::Odd), (13.0, 14.5, Symmetry::Even)] {
        let rec = &find(lo, hi, sym)[0];
        let coeffs = rec.coefficient_vector();
        let bound = 5.0 * rec.eps;
        for _ in 0..50 {
            // z and −1/z both at height ≥ √3/2
            let y: f64 = rng.gen_range(Y0..1.0);
            let xmax = (y / Y0 - y * y).sqrt();
            let z = UpperHalfPoint::new(rng.gen_range(-xmax..xmax), y).unwrap();
            let f = h.fourier_sum(&coeffs, z).unwrap();
            let fs = h.fourier_sum(&coeffs, apply(&MoebiusMap::S, z)).unwrap();
            assert!((f - fs).abs() <= bound, "S at {z:?}: {f} vs {fs}");
            let ft = h.fourier_sum(&coeffs, apply(&MoebiusMap::translation(1), z)).unwrap();
            assert!((f - ft).abs() <= bound, "T at {z:?}");
        }
    }
}
