//! Bessel functions of the first kind `J_nu(r)` for real `nu >= 0`, `r >= 0`.

mod envelope;
mod hankel;
mod integral;
mod krasikov;
mod recurrence;
mod series;
mod zeros;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::{Method, ValueWithError};

pub use envelope::{
    envelopes, global_half_power_log, series_bound_log, tail_bound_log, transition_bound_log, Envelope, EnvelopeKind,
};
pub use krasikov::{krasikov_parts, KrasikovParts};
pub use zeros::approx_zeros;

pub(crate) use hankel::{modulus_sq_coeffs, phase as hankel_phase};
pub(crate) use zeros::zeros_between;

pub const TOL_MIN: f64 = 1e-14;
pub const TOL_MAX: f64 = 1e-4;

/// Below `exp(UNDERFLOW_LOG)` the series envelope is returned as the error of a zero value.
const UNDERFLOW_LOG: f64 = -644.723_826_038_332_8; // ln(1e-280)

/// Panel budget for the integral representation.
const INTEGRAL_PANELS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselQuery {
    pub nu: f64,
    pub r: f64,
}

impl BesselQuery {
    pub fn new(nu: f64, r: f64) -> Result<Self> {
        let q = Self { nu, r };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return Err(Error::domain(format!("order must satisfy nu >= 0, got {}", self.nu)));
        }
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(Error::domain(format!("argument must satisfy r >= 0, got {}", self.r)));
        }
        Ok(())
    }
}

/// `J_nu(r)` with absolute error at most `tol`.
///
/// Methods are tried from cheapest to most expensive and the first whose
/// error estimate meets `tol` is returned. When none does, the result is
/// [`Error::ErrorTooLarge`] carrying the best estimate.
pub fn bessel_j(q: BesselQuery, tol: f64) -> Result<ValueWithError> {
    q.validate()?;
    if !(TOL_MIN..=TOL_MAX).contains(&tol) {
        return Err(Error::parameter(format!(
            "tol must lie in [{TOL_MIN:e}, {TOL_MAX:e}], got {tol:e}"
        )));
    }
    let best = dispatch(q.nu, q.r, tol);
    if best.error <= tol {
        Ok(best)
    } else {
        Err(Error::ErrorTooLarge {
            estimate: best.value,
            bound: best.error,
            tol,
        })
    }
}

/// Evaluate with one specific method, reporting that method's own error
/// estimate. Used for cross-validation.
pub fn bessel_j_by(q: BesselQuery, method: Method) -> Result<ValueWithError> {
    q.validate()?;
    let (nu, r) = (q.nu, q.r);
    if r == 0.0 && method != Method::Limit {
        return Err(Error::domain("r = 0 is only available as the series limit"));
    }
    let v = match method {
        Method::Limit => limit_at_zero(nu, r).ok_or_else(|| Error::domain("the limit method applies only at r = 0"))?,
        Method::PowerSeries => {
            let s = series::eval(nu, r);
            ValueWithError::new(s.value(), s.error(), Method::PowerSeries)
        }
        Method::ClosedForm => {
            closed_form(nu, r).ok_or_else(|| Error::domain(format!("no closed form for nu = {nu}")))?
        }
        Method::Krasikov => {
            let k = krasikov_parts(nu, r)?;
            krasikov_value(&k)
        }
        Method::Hankel => {
            let h = hankel::eval(nu, r);
            ValueWithError::new(h.value, h.error, Method::Hankel)
        }
        Method::Recurrence => {
            let e = recurrence::eval(nu, r, |o| low_order(o, r));
            ValueWithError::new(e.value, e.error, Method::Recurrence)
        }
        Method::IntegralRepresentation => {
            let e = integral::eval(nu, r, 1e-15, INTEGRAL_PANELS);
            ValueWithError::new(e.value, e.error, Method::IntegralRepresentation)
        }
        other => {
            return Err(Error::domain(format!("{other} is not a Bessel evaluation method")));
        }
    };
    if !v.value.is_finite() || !v.error.is_finite() {
        return Err(Error::domain(format!("{method} is not usable at nu = {nu}, r = {r}")));
    }
    Ok(v)
}

fn limit_at_zero(nu: f64, r: f64) -> Option<ValueWithError> {
    (r == 0.0).then(|| {
        let v = if nu == 0.0 { 1.0 } else { 0.0 };
        ValueWithError::new(v, 0.0, Method::Limit)
    })
}

fn closed_form(nu: f64, r: f64) -> Option<ValueWithError> {
    if nu != 0.5 && nu != 1.5 {
        return None;
    }
    let amp = (2.0 / (PI * r)).sqrt();
    let (s, c) = r.sin_cos();
    let v = if nu == 0.5 { amp * s } else { amp * (s / r - c) };
    let scale = if nu == 0.5 { amp } else { amp * (1.0 + 1.0 / r) };
    Some(ValueWithError::new(v, 4.0 * f64::EPSILON * scale, Method::ClosedForm))
}

fn krasikov_value(k: &KrasikovParts) -> ValueWithError {
    let rounding = 8.0 * f64::EPSILON * (1.0 + k.phase.abs()) * k.leading.abs().max(k.g_bound.cbrt());
    ValueWithError::new(k.leading, k.g_bound + rounding, Method::Krasikov)
}

/// `J_{order}(r)` for `order < 2`, as input to the recurrence.
fn low_order(order: f64, r: f64) -> (f64, f64) {
    if let Some(v) = closed_form(order, r) {
        return (v.value, v.error);
    }
    if r <= 4.0 {
        let s = series::eval(order, r);
        return (s.value(), s.error());
    }
    if r >= 20.0 {
        let h = hankel::eval(order, r);
        if h.error <= 1e-15 {
            return (h.value, h.error);
        }
    }
    let e = integral::eval(order, r, 1e-15, INTEGRAL_PANELS);
    (e.value, e.error)
}

/// Best available evaluation, never failing on accuracy.
pub(crate) fn dispatch(nu: f64, r: f64, tol: f64) -> ValueWithError {
    if let Some(v) = limit_at_zero(nu, r) {
        return v;
    }
    let env = series_bound_log(nu, r);
    if env < UNDERFLOW_LOG {
        return ValueWithError::new(0.0, env.exp().max(f64::MIN_POSITIVE), Method::Underflow);
    }
    let mut best: Option<ValueWithError> = None;
    let mut consider = |v: ValueWithError| -> Option<ValueWithError> {
        if v.error <= tol && v.value.is_finite() {
            return Some(v);
        }
        if v.error.is_finite() && best.as_ref().is_none_or(|b| v.error < b.error) {
            best = Some(v);
        }
        None
    };
    if let Some(v) = closed_form(nu, r) {
        if let Some(ok) = consider(v) {
            return ok;
        }
    }
    if r <= 8f64.max(nu / 2.0) {
        let s = series::eval(nu, r);
        if let Some(ok) = consider(ValueWithError::new(s.value(), s.error(), Method::PowerSeries)) {
            return ok;
        }
    }
    if nu > 0.5 && r > 2.0 * nu {
        let k = krasikov::parts_unchecked(nu, r);
        if k.g_bound <= tol / 2.0 {
            if let Some(ok) = consider(krasikov_value(&k)) {
                return ok;
            }
        }
    }
    if r >= nu.max(12.0) {
        let h = hankel::eval(nu, r);
        if let Some(ok) = consider(ValueWithError::new(h.value, h.error, Method::Hankel)) {
            return ok;
        }
    }
    if nu >= 1.0 {
        let e = recurrence::eval(nu, r, |o| low_order(o, r));
        if e.converged {
            if let Some(ok) = consider(ValueWithError::new(e.value, e.error, Method::Recurrence)) {
                return ok;
            }
        }
    }
    let e = integral::eval(nu, r, tol, INTEGRAL_PANELS);
    if let Some(ok) = consider(ValueWithError::new(e.value, e.error, Method::IntegralRepresentation)) {
        return ok;
    }
    best.unwrap_or(ValueWithError::new(
        f64::NAN,
        f64::INFINITY,
        Method::IntegralRepresentation,
    ))
}

/// Best evaluation without a tolerance failure; used inside quadrature.
pub(crate) fn eval_best(nu: f64, r: f64, tol: f64) -> ValueWithError {
    dispatch(nu, r, tol)
}

/// `ln |J_nu(r)|` with relative accuracy where the value is exponentially
/// small.
pub(crate) fn ln_abs_j(nu: f64, r: f64, tol: f64) -> f64 {
    if r == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if r <= 8f64.max(nu / 2.0) {
        let s = series::eval(nu, r);
        // the prefactor is exact up to rounding of its logarithm
        if s.sum_error <= 1e-12 * s.sum.abs() {
            return s.ln_abs();
        }
    }
    if nu >= 1.0 && r < nu {
        let e = recurrence::eval(nu, r, |o| low_order(o, r));
        if e.converged {
            return e.ln_abs;
        }
    }
    eval_best(nu, r, tol).value.abs().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(nu: f64, r: f64) -> BesselQuery {
        BesselQuery::new(nu, r).unwrap()
    }

    #[test]
    fn limit_at_origin() {
        assert_eq!(bessel_j(q(0.0, 0.0), 1e-12).unwrap().value, 1.0);
        assert_eq!(bessel_j(q(2.5, 0.0), 1e-12).unwrap().value, 0.0);
        let tiny = bessel_j(q(0.0, 1e-9), 1e-12).unwrap();
        assert!((tiny.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_order_at_half_pi() {
        let v = bessel_j(q(0.5, PI / 2.0), 1e-12).unwrap();
        assert!((v.value - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn series_example() {
        let v = bessel_j(q(2.0, 1.0), 1e-12).unwrap();
        assert!((v.value - 0.114_903_484_931_900_48).abs() <= 1e-12);
    }

    #[test]
    fn large_order_against_krasikov() {
        let v = bessel_j(q(100.0, 250.0), 1e-12).unwrap();
        // 30-digit reference
        assert!((v.value - 0.040_899_589_806_540_92).abs() < 1e-12);
        let k = krasikov_parts(100.0, 250.0).unwrap();
        assert!((k.leading - 0.040_906_447_100_338_34).abs() < 1e-12);
        assert!((k.g_bound - 2.883_227_897e-4).abs() < 1e-12);
        assert!((v.value - k.leading).abs() <= k.g_bound);
    }

    #[test]
    fn tolerance_range_enforced() {
        assert!(matches!(bessel_j(q(1.0, 1.0), 1e-15), Err(Error::Parameter(_))));
        assert!(matches!(bessel_j(q(1.0, 1.0), 1e-3), Err(Error::Parameter(_))));
        assert!(matches!(BesselQuery::new(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(
            bessel_j(BesselQuery { nu: 1.0, r: -2.0 }, 1e-8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn underflow_regime() {
        let v = bessel_j(q(400.0, 1e-3), 1e-10).unwrap();
        assert_eq!(v.value, 0.0);
        assert_eq!(v.method, Method::Underflow);
        assert!(ln_abs_j(400.0, 1e-3, 1e-12) < -3000.0);
    }

    #[test]
    fn transition_values() {
        // 30-digit references
        let cases = [
            (10.0, 10.0, 0.207_486_106_633_358_9),
            (50.0, 40.0, 0.000_681_852_435_317_683_1),
            (200.0, 210.0, 0.031_620_020_933_562_85),
        ];
        for (nu, r, expect) in cases {
            let v = bessel_j(q(nu, r), 1e-13).unwrap();
            assert!((v.value - expect).abs() < 1e-13 + v.error, "nu={nu} r={r} got {v}");
        }
    }
}
