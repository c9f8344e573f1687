mod common;

use proptest::prelude::*;
use sphere_restriction::gamma::{ln_gamma, log_sphere_measure, sphere_measure, stirling_base};
use sphere_restriction::restriction::{
    classify, conjugate, general_upper_bound_log, hls_normalized, log_ell_d, propagator_constant, radial_constant,
    theta, Region,
};

proptest! {
    #[test]
    fn gamma_recurrence(x in 0.5f64..50.0) {
        let a = ln_gamma(x + 1.0).unwrap().value;
        let b = ln_gamma(x).unwrap().value;
        prop_assert!((a - b - x.ln()).abs() < 1e-12);
    }

    #[test]
    fn stirling_remainder_in_bracket(x in 1.0f64..200.0) {
        let theta = ln_gamma(x).unwrap().value - stirling_base(x);
        prop_assert!(theta > 0.0 && theta < 1.0 / (12.0 * x));
    }

    #[test]
    fn regions_partition_the_square(p in 1.0f64..4.0, q in 1.0f64..20.0, d in 2u32..400) {
        let pair = classify(p, q, d).unwrap();
        let expect = if p >= 2.0 { Region::C } else if q < conjugate(p) { Region::A } else { Region::B };
        // exact comparisons only differ on the rounding band around q = p'
        if (q / conjugate(p) - 1.0).abs() > 1e-9 {
            prop_assert_eq!(pair.region, expect);
        }
        prop_assert_eq!(pair.rad_finite, p < 2.0 * d as f64 / (d as f64 + 1.0));
    }

    #[test]
    fn hoelder_chain(d in 3u32..40, t in 0.0f64..1.0, q in 1.0f64..6.0, q2 in 1.0f64..6.0) {
        let df = d as f64;
        let p = 1.0 + t * (2.0 * df / (df + 1.0) - 1.0) * 0.95;
        let a = radial_constant(d, p, q, 1e-9).unwrap();
        let b = radial_constant(d, p, q2, 1e-9).unwrap();
        let expect = (1.0 / q - 1.0 / q2) * log_sphere_measure(d) + b.log_value();
        prop_assert!((a.log_value() - expect).abs() < 1e-12 * (1.0 + expect.abs()));
    }

    #[test]
    fn divergence_criterion(d in 2u32..400, s in 0.0f64..1.0) {
        let df = d as f64;
        let p = 2.0 * df / (df + 1.0) + s;
        prop_assert!(radial_constant(d, p, 2.0, 1e-8).unwrap().is_infinite());
    }

    #[test]
    fn theta_in_unit_interval_below_endpoint(d in 3u32..400, t in 0.0f64..0.999) {
        let df = d as f64;
        let ps = 2.0 * (df + 1.0) / (df + 3.0);
        let th = theta(d, 1.0 + t * (ps - 1.0));
        prop_assert!(th > 0.0 && th <= 1.0 + 1e-12);
    }
}

#[test]
fn gamma_half_integers() {
    for n in 0..=20u32 {
        let mut v = std::f64::consts::PI.sqrt();
        for k in 1..=n {
            v *= (2 * k - 1) as f64 / 2.0;
        }
        let g = ln_gamma(n as f64 + 0.5).unwrap().value.exp();
        assert!(common::rel_close(g, v, 1e-10), "n = {n}");
    }
}

#[test]
fn sphere_measure_shrinks_from_eight() {
    for d in 8..400 {
        assert!(log_sphere_measure(d + 1) < log_sphere_measure(d));
    }
    assert!(sphere_measure(1).is_err());
}

#[test]
fn corner_is_one_in_every_dimension() {
    for d in 2..200 {
        let r = radial_constant(d, 1.0, f64::INFINITY, 1e-8).unwrap();
        assert_eq!(r.finite_value(), Some(1.0));
        assert_eq!(r.pair.region, Region::Corner);
    }
}

#[test]
fn three_dimensional_closed_form() {
    let pi = std::f64::consts::PI;
    let expect = (32.0 * pi.powi(3)).powf(0.25) / (4.0 * pi).sqrt();
    let r = radial_constant(3, 4.0 / 3.0, 2.0, 1e-10).unwrap();
    assert!(common::rel_close(r.finite_value().unwrap(), expect, 1e-6));
}

#[test]
fn dimension_limits() {
    let target = (2.0 / std::f64::consts::E).sqrt();
    assert!(common::rel_close(log_ell_d(400).unwrap().exp(), target, 0.05));
    assert!(common::rel_close(hls_normalized(1000).unwrap().value, 1.0, 0.02));
    let c = propagator_constant(10_000, 2.07).unwrap();
    assert!(common::rel_close(c.composite(), 2.0, 0.05));
}

#[test]
fn general_bound_preconditions() {
    assert!(general_upper_bound_log(40, 4.0 / 3.0, 2.0, 0.8).is_ok());
    assert!(general_upper_bound_log(40, 1.5, 4.0, 0.8).is_err());
    assert!(general_upper_bound_log(2, 1.2, 2.0, 0.8).is_err());
}

#[test]
fn continuous_as_p_tends_to_one() {
    for d in [3u32, 5, 10, 30] {
        let at_one = radial_constant(d, 1.0, 2.0, 1e-9).unwrap().log_value();
        let near = radial_constant(d, 1.0 + 1e-12, 2.0, 1e-9).unwrap().log_value();
        assert!((near - at_one).abs() < 1e-8, "d = {d}: {near} vs {at_one}");
    }
}
