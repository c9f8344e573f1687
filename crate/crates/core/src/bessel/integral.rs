//! Schläfli's integral
//! `J_nu(r) = (1/pi) int_0^pi cos(nu t - r sin t) dt
//!            - (sin(nu pi)/pi) int_0^inf exp(-nu t - r sinh t) dt`.

use std::f64::consts::PI;

use crate::quad::{integrate, Target};

pub(crate) struct IntegralEval {
    pub value: f64,
    pub error: f64,
}

/// `sin(nu pi)`, exact on the half-integer grid.
pub(crate) fn sin_nu_pi(nu: f64) -> f64 {
    let two_nu = 2.0 * nu;
    if two_nu.fract() == 0.0 {
        if nu.fract() == 0.0 {
            return 0.0;
        }
        let k = (nu - 0.5) as u64;
        return if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    }
    let fl = nu.floor();
    let s = (PI * (nu - fl)).sin();
    if (fl as u64).is_multiple_of(2) {
        s
    } else {
        -s
    }
}

/// Level at which the exponential integrand is cut off.
const TAIL_EXPONENT: f64 = 50.0;

pub(crate) fn eval(nu: f64, r: f64, abs_tol: f64, max_panels: usize) -> IntegralEval {
    // Oscillatory part: split so the phase moves by at most pi/2 per panel.
    let phase = |t: f64| nu * t - r * t.sin();
    let n = ((2.0 * (nu + r)).ceil() as usize).max(4);
    let mut pts: Vec<f64> = (0..=n).map(|k| PI * k as f64 / n as f64).collect();
    if r > nu {
        pts.push((nu / r).acos());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
    }
    // below this the rounding of the phase and of the panel sums dominates
    let floor = f64::EPSILON * PI * (32.0 + 8.0 * (nu * PI + r));
    let target = Target {
        abs: (0.5 * abs_tol * PI).max(floor),
        rel: 0.0,
    };
    let osc = integrate(|t| phase(t).cos(), &pts, target, max_panels);
    let mut value = osc.value / PI;
    let mut error = osc.error / PI + 2.0 * f64::EPSILON * (nu * PI + r + 1.0);

    let s = sin_nu_pi(nu);
    if s != 0.0 {
        let g = |t: f64| nu * t + r * t.sinh();
        let mut hi = 1.0;
        while g(hi) < TAIL_EXPONENT {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < TAIL_EXPONENT {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let big_t = hi;
        let pts: Vec<f64> = (0..=16).map(|k| big_t * k as f64 / 16.0).collect();
        let target = Target {
            abs: (0.5 * abs_tol * PI).max(floor),
            rel: 0.0,
        };
        let tail = integrate(|t| (-g(t)).exp(), &pts, target, max_panels);
        // g is convex and increasing, so int_T^inf e^{-g} <= e^{-g(T)} / g'(T)
        let rest = (-g(big_t)).exp() / (nu + r * big_t.cosh());
        value -= s / PI * tail.value;
        error += s.abs() / PI * (tail.error + rest);
    }
    IntegralEval { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_nu_pi_grid() {
        assert_eq!(sin_nu_pi(3.0), 0.0);
        assert_eq!(sin_nu_pi(0.5), 1.0);
        assert_eq!(sin_nu_pi(1.5), -1.0);
        assert_eq!(sin_nu_pi(100.5), 1.0);
        assert!((sin_nu_pi(0.25) - (PI / 4.0).sin()).abs() < 1e-16);
        assert!((sin_nu_pi(7.3) - (7.3 * PI).sin()).abs() < 1e-13);
    }

    #[test]
    fn half_order_closed_form() {
        for r in [0.2, 1.0, 5.0, 17.0] {
            let e = eval(0.5, r, 1e-14, 20_000);
            let exact = (2.0 / (PI * r)).sqrt() * r.sin();
            assert!((e.value - exact).abs() <= e.error.max(1e-14), "r={r}");
        }
    }

    #[test]
    fn integer_order_reference() {
        // J_2(1) from the series
        let e = eval(2.0, 1.0, 1e-14, 20_000);
        assert!((e.value - 0.114_903_484_931_900_48).abs() < 1e-14);
    }
}
