//! Summation properties of the basic hypergeometric series.

use ellbeta::series::{phi_terms, sum_phi, sum_vwp_w, vwp_expand, PhiSeriesSpec};
use ellbeta::special::{qpoch_finite, qpoch_inf, TruncationPolicy, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn polar(lo: f64, hi: f64) -> impl Strategy<Value = C64> {
    (lo..hi, -PI..PI).prop_map(|(r, phi)| C64::from_polar(r, phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// `1phi0(a;;q,z) = (az;q)/(z;q)`.
    #[test]
    fn q_binomial(a in polar(0.1, 2.0), q in polar(0.05, 0.8), z in polar(0.05, 0.8)) {
        let pol = TruncationPolicy::default();
        let spec = PhiSeriesSpec::new(vec![a], vec![], q, z).unwrap();
        let want = qpoch_inf(a * z, q, &pol).unwrap() / qpoch_inf(z, q, &pol).unwrap();
        prop_assert!(rel(sum_phi(&spec, &pol).unwrap().value, want) < 1e-10);
    }

    #[test]
    fn cancelling_pair_is_invisible(a in polar(0.1, 0.9), b in polar(0.1, 0.9), c in polar(0.1, 0.9),
                                    q in polar(0.05, 0.6), z in polar(0.05, 0.6)) {
        let pol = TruncationPolicy::default();
        let spec = PhiSeriesSpec::new(vec![a, b], vec![c], q, z).unwrap();
        let padded = spec.clone().with_pair(c * 0.7, c * 0.7);
        prop_assert!(rel(sum_phi(&spec, &pol).unwrap().value, sum_phi(&padded, &pol).unwrap().value) < 1e-13);
    }

    #[test]
    fn numerator_q_power_terminates(n in 0usize..6, b in polar(0.1, 0.9), c in polar(0.1, 0.9), q in polar(0.2, 0.8)) {
        let pol = TruncationPolicy::default();
        let qn = q.powi(-(n as i32));
        let spec = PhiSeriesSpec::new(vec![qn, b], vec![c], q, C64::new(0.5, 0.0)).unwrap();
        let r = sum_phi(&spec, &pol).unwrap();
        prop_assert!(r.terminated);
        prop_assert!(r.terms_used <= n + 1);
        let direct: C64 = phi_terms(&spec, n + 1).iter().sum();
        prop_assert!(rel(r.value, direct) < 1e-12);
    }

    /// q-Chu-Vandermonde: `2phi1(q^-n, b; c; q, cq^n/b) = (c/b;q)_n/(c;q)_n`.
    #[test]
    fn chu_vandermonde(n in 0usize..8, b in polar(0.2, 0.9), c in polar(0.2, 0.9), q in polar(0.2, 0.7)) {
        let pol = TruncationPolicy::default();
        let z = c * q.powi(n as i32) / b;
        let spec = PhiSeriesSpec::new(vec![q.powi(-(n as i32)), b], vec![c], q, z).unwrap();
        let want = qpoch_finite(c / b, q, n) / qpoch_finite(c, q, n);
        prop_assert!(rel(sum_phi(&spec, &pol).unwrap().value, want) < 1e-9);
    }

    #[test]
    fn w_series_is_its_phi_expansion(a in polar(0.1, 0.6), b1 in polar(0.2, 0.9), b2 in polar(0.2, 0.9),
                                     q in polar(0.05, 0.6), z in polar(0.05, 0.5)) {
        let pol = TruncationPolicy::default();
        let w = sum_vwp_w(a, &[b1, b2], q, z, &pol).unwrap();
        let phi = sum_phi(&vwp_expand(a, &[b1, b2], q, z).unwrap(), &pol).unwrap();
        prop_assert_eq!(w.value, phi.value);
    }
}
