//! Property tests for the geometric and algebraic invariants.

use b2disc::bloch::AnalyticFunction;
use b2disc::carleson::{Arc, BoxQuadrature};
use b2disc::extension::mcshane_extend;
use b2disc::geometry::{hyperbolic_distance, MobiusMap};
use b2disc::operators::{cesaro_direct, cesaro_matrix};
use b2disc::weights::{b2_characteristic, sarason_check, Weight};
use b2disc::{DiskPoint, MetricConvention};
use num_complex::Complex64;
use proptest::prelude::*;

const CONVENTIONS: [MetricConvention; 2] = [MetricConvention::Squared, MetricConvention::Standard];

fn disc_point(r_max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn distance_is_symmetric_and_vanishes_on_the_diagonal(z in disc_point(0.99), w in disc_point(0.99)) {
        for c in CONVENTIONS {
            prop_assert_eq!(hyperbolic_distance(z, z, c), 0.0);
            prop_assert!(close(hyperbolic_distance(z, w, c), hyperbolic_distance(w, z, c), 1e-12));
        }
    }

    #[test]
    fn distance_is_mobius_invariant(a in disc_point(0.9), z in disc_point(0.9), w in disc_point(0.9)) {
        let phi = MobiusMap::new(DiskPoint::from_complex(a).unwrap());
        for c in CONVENTIONS {
            let before = hyperbolic_distance(z, w, c);
            let after = hyperbolic_distance(phi.apply_complex(z), phi.apply_complex(w), c);
            prop_assert!(close(before, after, 1e-9), "{before} {after}");
        }
    }

    #[test]
    fn standard_distance_obeys_the_triangle_inequality(
        a in disc_point(0.999), b in disc_point(0.999), c in disc_point(0.999)
    ) {
        let d = |x, y| hyperbolic_distance(x, y, MetricConvention::Standard);
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-9);
    }

    #[test]
    fn mcshane_is_lipschitz_and_interpolates(
        pts in prop::collection::vec(disc_point(0.95), 2..40),
        probes in prop::collection::vec(disc_point(0.99), 20),
        slope in 0.1f64..3.0,
    ) {
        // data from a function that is 1-Lipschitz in the standard metric
        let d = |x, y| hyperbolic_distance(x, y, MetricConvention::Standard);
        let values: Vec<f64> = pts.iter().map(|&z| slope * d(z, Complex64::new(0.0, 0.0))).collect();
        let points: Vec<DiskPoint> = pts.iter().map(|&z| DiskPoint::from_complex(z).unwrap()).collect();
        let ext = mcshane_extend(&points, &values, slope).unwrap();
        for (p, v) in points.iter().zip(&values) {
            prop_assert_eq!(ext.eval(p.z()), *v);
        }
        for pair in probes.windows(2) {
            let gap = (ext.eval(pair[0]) - ext.eval(pair[1])).abs();
            prop_assert!(gap <= slope * d(pair[0], pair[1]) + 1e-9);
        }
    }

    #[test]
    fn sarason_variance_bound(
        logs in prop::collection::vec(-1.0f64..1.0, 2..12),
        raw in prop::collection::vec(0.01f64..1.0, 12),
    ) {
        let masses: Vec<f64> = raw[..logs.len()].to_vec();
        let total: f64 = masses.iter().sum();
        let masses: Vec<f64> = masses.iter().map(|m| m / total).collect();
        let w: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        if let Ok(r) = sarason_check(&w, &masses) {
            prop_assert!(r.bound_ok, "{r:?}");
        }
    }

    #[test]
    fn cesaro_matrix_matches_the_series(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..6),
        f in prop::collection::vec(-1.0f64..1.0, 1..6),
    ) {
        let g = AnalyticFunction::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect());
        let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.5 * x)).collect();
        let m = cesaro_matrix(&g, 16);
        prop_assert!(m.is_strictly_lower());
        let a = m.apply_monomial(&c);
        let b = cesaro_direct(&g, &c, 16);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn inverse_negates_the_log(z in disc_point(0.99), s in 0.1f64..1.5, angle in 0.0f64..6.0) {
        let w = Weight::point(s, angle);
        prop_assert_eq!(w.inverse().log_eval(z), -w.log_eval(z));
    }
}

#[test]
fn radial_characteristic_is_symmetric_under_inversion() {
    // ⟨w⟩⟨w^{−1}⟩ is symmetric in w ↔ w^{−1}
    for a in [0.25, 0.5, 0.75] {
        let q = BoxQuadrature::default();
        let p = b2_characteristic(&Weight::radial(a), Arc::full_circle(), 10, &q).unwrap();
        let n = b2_characteristic(&Weight::radial(-a), Arc::full_circle(), 10, &q).unwrap();
        assert!(close(p.characteristic_sq, n.characteristic_sq, 1e-12));
        assert!(p.in_b2);
    }
}

#[test]
fn point_weight_characteristic_is_rotation_invariant() {
    let q = BoxQuadrature { radial_levels: 8, ..BoxQuadrature::default() };
    // rotating by a multiple of 2π/2^8 maps the dyadic grid to itself
    let step = std::f64::consts::TAU / 256.0;
    let a = b2_characteristic(&Weight::point(0.5, 0.3), Arc::full_circle(), 6, &q).unwrap();
    let b = b2_characteristic(&Weight::point(0.5, 0.3 + 32.0 * step), Arc::full_circle(), 6, &q).unwrap();
    assert!(close(a.characteristic_sq, b.characteristic_sq, 1e-6), "{} {}", a.characteristic_sq, b.characteristic_sq);
}
