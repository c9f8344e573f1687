//! Log-Gamma via the Stirling series, and per-dimension sphere constants.
//!
//! Everything dimension dependent is kept in log scale: `Gamma(d/2)` overflows
//! a double near `d = 340` and `sigma(S^{d-1})` underflows near `d = 400`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{Method, ValueWithError};

/// ln sqrt(2 pi)
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument the series is entered through upward recursion.
const STIRLING_MIN: f64 = 8.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..=9.
const STIRLING_COEFFS: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
];

/// First omitted coefficient, `B_20 / (20 * 19)`.
const STIRLING_NEXT: f64 = -174_611.0 / 125_400.0;

/// The Stirling correction `theta(x) = ln Gamma(x) - [ln sqrt(2 pi) + (x - 1/2) ln x - x]`
/// for `x >= STIRLING_MIN`, with a bound on the truncation.
fn stirling_correction(x: f64) -> (f64, f64) {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut acc = 0.0;
    for c in STIRLING_COEFFS {
        acc += c * pow;
        pow *= inv2;
    }
    (acc, (STIRLING_NEXT * pow).abs())
}

/// Stirling base `ln sqrt(2 pi) + (x - 1/2) ln x - x`.
pub fn stirling_base(x: f64) -> f64 {
    LN_SQRT_2PI + (x - 0.5) * x.ln() - x
}

/// `ln Gamma(x)` for `x > 0` with an absolute error bound.
///
/// For `x >= 8` the Stirling series with nine correction terms is used
/// directly; smaller arguments are shifted up with `Gamma(x+1) = x Gamma(x)`.
pub fn ln_gamma(x: f64) -> Result<ValueWithError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    let (v, e) = ln_gamma_with_bound(x);
    Ok(ValueWithError::new(v, e, Method::Stirling))
}

/// Unchecked `ln Gamma(x)`; callers guarantee `x > 0`.
pub fn lgamma(x: f64) -> f64 {
    ln_gamma_with_bound(x).0
}

fn ln_gamma_with_bound(x: f64) -> (f64, f64) {
    let mut shift = 0.0;
    let mut prod = 1.0;
    let mut y = x;
    let mut steps = 0u32;
    while y < STIRLING_MIN {
        prod *= y;
        // keep the running product well inside range
        if !(1e-280..=1e280).contains(&prod) {
            shift += prod.ln();
            prod = 1.0;
        }
        y += 1.0;
        steps += 1;
    }
    shift += prod.ln();
    let base = stirling_base(y);
    let (theta, trunc) = stirling_correction(y);
    let value = base + theta - shift;
    let rounding = f64::EPSILON * (2.0 * ((y - 0.5) * y.ln()).abs() + 2.0 * y + shift.abs() + steps as f64 + 1.0);
    (value, trunc + rounding)
}

/// The admissible interval `(0, 1/(12x))` for the Stirling remainder `theta(x)`.
pub fn stirling_theta_bracket(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("stirling bracket requires x > 0, got {x}")));
    }
    Ok((0.0, 1.0 / (12.0 * x)))
}

/// `theta(x)` computed as `ln Gamma(x)` minus the Stirling base, for checking
/// against [`stirling_theta_bracket`].
pub fn stirling_theta(x: f64) -> Result<f64> {
    let lg = ln_gamma(x)?;
    Ok(lg.value - stirling_base(x))
}

/// Constants attached to one ambient dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionParams {
    pub d: u32,
    /// Bessel order `d/2 - 1`.
    pub nu: f64,
    /// Endpoint Stein–Tomas exponent `2(d+1)/(d+3)`.
    pub p_star: f64,
    /// `ln sigma(S^{d-1})`.
    pub log_sigma: f64,
}

impl DimensionParams {
    /// Surface measure of the sphere. Underflows to zero for very large `d`;
    /// prefer `log_sigma` in arithmetic.
    pub fn sigma(&self) -> f64 {
        self.log_sigma.exp()
    }

    /// Conjugate of the Stein–Tomas exponent, `2(d+1)/(d-1)`.
    pub fn p_star_conj(&self) -> f64 {
        let d = self.d as f64;
        2.0 * (d + 1.0) / (d - 1.0)
    }
}

/// `ln sigma(S^{d-1}) = ln 2 + (d/2) ln pi - ln Gamma(d/2)`.
pub fn log_sphere_measure(d: u32) -> f64 {
    let half = d as f64 / 2.0;
    LN_2 + half * PI.ln() - lgamma(half)
}

pub fn sphere_measure(d: u32) -> Result<DimensionParams> {
    if d < 2 {
        return Err(Error::domain(format!("dimension must be at least 2, got {d}")));
    }
    let df = d as f64;
    Ok(DimensionParams {
        d,
        nu: df / 2.0 - 1.0,
        p_star: 2.0 * (df + 1.0) / (df + 3.0),
        log_sigma: log_sphere_measure(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!(ln_gamma(1.0).unwrap().value.abs() < 1e-15);
        assert!((ln_gamma(2.0).unwrap().value).abs() < 1e-15);
        let half = ln_gamma(0.5).unwrap();
        assert!((half.value - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((half.value - 0.572_364_942_924_700_1).abs() <= half.error.max(1e-15));
        let ten = ln_gamma(10.0).unwrap();
        assert!((ten.value - 362_880f64.ln()).abs() < 1e-13);
        assert!((ten.value - 12.801_827_480_081_47).abs() < 1e-12);
    }

    #[test]
    fn error_bound_is_small_for_moderate_arguments() {
        for x in [1.0, 1.5, 3.0, 7.9, 8.0, 20.0, 100.0, 200.0] {
            let v = ln_gamma(x).unwrap();
            assert!(v.error <= 1e-12, "x={x} bound {}", v.error);
        }
        // past that the value itself is large and the bound is relative
        for x in [500.0, 1e4, 1e8] {
            let v = ln_gamma(x).unwrap();
            assert!(v.error <= 8.0 * f64::EPSILON * v.value, "x={x}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(-1.5), Err(Error::Domain(_))));
        assert!(ln_gamma(f64::NAN).is_err());
        assert!(sphere_measure(1).is_err());
    }

    #[test]
    fn recurrence_on_grid() {
        for i in 0..1000 {
            let x = 0.5 + 49.5 * i as f64 / 999.0;
            let d = lgamma(x + 1.0) - lgamma(x) - x.ln();
            assert!(d.abs() < 1e-12, "x={x} diff {d}");
        }
    }

    #[test]
    fn half_integer_closed_form() {
        // Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        let mut fact_2n = 1.0f64;
        let mut fact_n = 1.0f64;
        for n in 0..=20u32 {
            if n > 0 {
                fact_n *= n as f64;
                fact_2n *= (2 * n - 1) as f64 * (2 * n) as f64;
            }
            let closed = fact_2n * PI.sqrt() / (4f64.powi(n as i32) * fact_n);
            let got = lgamma(n as f64 + 0.5).exp();
            assert!(((got - closed) / closed).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn stirling_bracket_holds() {
        assert_eq!(stirling_theta_bracket(1.0).unwrap(), (0.0, 1.0 / 12.0));
        assert_eq!(stirling_theta_bracket(12.0).unwrap(), (0.0, 1.0 / 144.0));
        for x in [1.0, 2.0, 5.0, 10.0, 100.0] {
            let theta = stirling_theta(x).unwrap();
            let (lo, hi) = stirling_theta_bracket(x).unwrap();
            assert!(theta > lo && theta < hi, "x={x} theta={theta}");
        }
        // reference value from a 30-digit evaluation
        let t5 = stirling_theta(5.0).unwrap();
        assert!((t5 - 0.016_644_691_189_821_19).abs() < 1e-13);
        assert!(t5 < 1.0 / 60.0);
    }

    #[test]
    fn sphere_measure_low_dimensions() {
        let c = sphere_measure(2).unwrap();
        assert!((c.sigma() - 2.0 * PI).abs() < 1e-13);
        assert_eq!(c.nu, 0.0);
        let s = sphere_measure(3).unwrap();
        assert!((s.sigma() - 4.0 * PI).abs() < 1e-13);
        assert_eq!(s.nu, 0.5);
    }

    #[test]
    fn sphere_measure_d200_log_scale() {
        // 30-digit reference for ln 2 + 100 ln pi - ln Gamma(100)
        let p = sphere_measure(200).unwrap();
        assert!((p.log_sigma - (-243.968_069_604_075_44)).abs() < 1e-10);
        assert!(p.sigma() > 0.0);
        assert_eq!(p.nu, 99.0);
    }

    #[test]
    fn p_star_increasing_in_open_interval() {
        let mut prev = 1.0;
        for d in 2..=400 {
            let p = sphere_measure(d).unwrap().p_star;
            assert!(p > prev && p < 2.0);
            prev = p;
        }
    }

    #[test]
    fn log_sigma_decreasing_from_eight() {
        let mut prev = f64::INFINITY;
        for d in 8..=400 {
            let l = log_sphere_measure(d);
            assert!(l < prev, "d={d}");
            prev = l;
        }
    }
}
