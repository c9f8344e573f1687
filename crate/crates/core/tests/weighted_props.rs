mod common;

use proptest::prelude::*;
use sphere_restriction::bessel::{bessel_j, BesselQuery};
use sphere_restriction::weighted::{weighted_norm, weighted_norm_with, weighted_sup_on, NormOptions, NormQuery};

/// Trapezoid value of `int_0^u |J_nu(r) r^alpha|^p dr` after `r = u s^k`,
/// which removes the singularity at the origin, with the difference between
/// `n` and `2n` nodes as error estimate.
fn trapezoid(nu: f64, p: f64, alpha: f64, u: f64, n: usize) -> (f64, f64) {
    let k = (2.0 / (p * (nu + alpha) + 1.0)).max(1.0);
    let f = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let r = u * s.powf(k);
        let jv = bessel_j(BesselQuery::new(nu, r).unwrap(), 1e-12).unwrap().value;
        (jv * r.powf(alpha)).abs().powf(p) * u * k * s.powf(k - 1.0)
    };
    let rule = |m: usize| {
        let h = 1.0 / m as f64;
        let inner: f64 = (1..m).map(|i| f(i as f64 * h)).sum();
        h * (inner + 0.5 * (f(0.0) + f(1.0)))
    };
    let (a, b) = (rule(n), rule(2 * n));
    (b, (b - a).abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn matches_trapezoid_reference(nu in 0.0f64..10.0, p in 1.0f64..6.0, t in 0.05f64..0.95) {
        let lo = -nu - 1.0 / p;
        let alpha = lo + t * (0.5 - 1.0 / p - lo);
        let u = 30.0;
        let q = NormQuery::new(nu, p, alpha, 1e-9).unwrap();
        let opts = NormOptions { upper_limit: Some(u), ..NormOptions::default() };
        let res = weighted_norm_with(&q, &opts).unwrap();
        let (t_val, t_err) = trapezoid(nu, p, alpha, u, 20_000);
        let reference = t_val.powf(1.0 / p);
        let ref_rel = 2.0 * t_err / (p * t_val);
        prop_assert!(
            (res.value - reference).abs() <= (res.rel_error + ref_rel + 1e-12) * reference,
            "{} vs {} (rel errors {} and {})", res.value, reference, res.rel_error, ref_rel
        );
    }

    #[test]
    fn tolerance_doubling_is_consistent(nu in 0.0f64..40.0, p in 1.0f64..8.0, t in 0.1f64..0.9, e in 5.0f64..10.0) {
        let lo = -nu - 1.0 / p;
        let alpha = lo + t * (0.5 - 1.0 / p - lo);
        let tol = 10f64.powf(-e);
        let a = weighted_norm(&NormQuery::new(nu, p, alpha, tol).unwrap()).unwrap();
        let b = weighted_norm(&NormQuery::new(nu, p, alpha, 2.0 * tol).unwrap()).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(((a.log_value - b.log_value).exp() - 1.0).abs() <= 3.0 * tol);
    }

    #[test]
    fn segments_add_up(nu in 0.0f64..60.0, p in 1.0f64..8.0, t in 0.1f64..0.9) {
        let lo = -nu - 1.0 / p;
        let alpha = lo + t * (0.5 - 1.0 / p - lo);
        let r = weighted_norm(&NormQuery::new(nu, p, alpha, 1e-8).unwrap()).unwrap();
        let total = (p * r.log_value - r.log_scale).exp();
        let sum = r.segment_sum();
        prop_assert!((total - sum).abs() <= 1e-14 * sum + r.segment_error() + 1e-13 * sum);
    }

    #[test]
    fn tail_cutoff_is_stable(nu in 0.0f64..30.0, p in 2.5f64..8.0, t in 0.1f64..0.9) {
        let lo = -nu - 1.0 / p;
        let alpha = lo + t * (0.5 - 1.0 / p - lo);
        let tol = 1e-8;
        let q = NormQuery::new(nu, p, alpha, tol).unwrap();
        let a = weighted_norm(&q).unwrap();
        let opts = NormOptions { r_tail: Some(2.0 * a.r_tail), ..NormOptions::default() };
        let b = weighted_norm_with(&q, &opts).unwrap();
        prop_assert!(((a.log_value - b.log_value).exp() - 1.0).abs() <= 2.0 * tol);
    }
}

#[test]
fn large_p_approaches_sup_on_interval() {
    let (nu, u) = (5.0, 40.0);
    let q = NormQuery::new(nu, 64.0, 0.0, 1e-8).unwrap();
    let n = weighted_norm_with(
        &q,
        &NormOptions {
            upper_limit: Some(u),
            ..NormOptions::default()
        },
    )
    .unwrap();
    let s = weighted_sup_on(nu, 0.0, Some(u)).unwrap();
    assert!(common::rel_close(n.value, s.value, 0.05), "{} vs {}", n.value, s.value);
}

#[test]
fn divergent_queries_are_rejected() {
    assert!(NormQuery::new(0.5, 2.0, 0.0, 1e-8).is_err());
    assert!(NormQuery::new(2.0, 2.0, -2.6, 1e-8).is_err());
    assert!(NormQuery::new(2.0, 0.5, 0.0, 1e-8).is_err());
    assert!(NormQuery::new(2.0, 2.0, -1.0, 0.1).is_err());
}
