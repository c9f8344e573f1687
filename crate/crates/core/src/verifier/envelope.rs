//! Right-hand sides of the two-sided bounds for weighted Bessel norms.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper and lower envelopes of `N(nu, p, alpha)`, in log scale. The
/// absolute constants are not included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StempakEnvelope {
    pub upper_log: f64,
    pub lower_log: f64,
}

impl StempakEnvelope {
    pub fn upper(&self) -> f64 {
        self.upper_log.exp()
    }

    pub fn lower(&self) -> f64 {
        self.lower_log.exp()
    }
}

/// Envelopes for `nu >= 2` and admissible `(p, alpha)`; `p = inf` gives the
/// sup-norm envelopes `2^{-alpha} nu^{alpha - 1/3}` and `30^alpha nu^{alpha - 1/2}`.
pub fn stempak_envelope(nu: f64, p: f64, alpha: f64) -> Result<StempakEnvelope> {
    if !(nu >= 2.0) || !nu.is_finite() {
        return Err(Error::domain(format!("envelopes need nu >= 2, got {nu}")));
    }
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p must be at least 1, got {p}")));
    }
    let ln_nu = nu.ln();
    let ln_30 = 30f64.ln();
    if p.is_infinite() {
        if !(alpha > -nu && alpha < 0.5) {
            return Err(Error::domain(format!(
                "p = inf needs -nu < alpha < 1/2, got alpha = {alpha}"
            )));
        }
        return Ok(StempakEnvelope {
            upper_log: -alpha * LN_2 + (alpha - 1.0 / 3.0) * ln_nu,
            lower_log: alpha * ln_30 + (alpha - 0.5) * ln_nu,
        });
    }
    if !(alpha > -nu - 1.0 / p && alpha < 0.5 - 1.0 / p) {
        return Err(Error::domain(format!(
            "alpha = {alpha} outside (-nu - 1/p, 1/2 - 1/p) = ({}, {})",
            -nu - 1.0 / p,
            0.5 - 1.0 / p
        )));
    }
    let head = 1.0 / (p * (nu + alpha) + 1.0).abs();
    let tail = 1.0 / (p * (alpha - 0.5) + 1.0).abs();
    let (middle, power) = if p < 4.0 {
        (1.0 / (4.0 - p), alpha - 0.5 + 1.0 / p)
    } else if p == 4.0 {
        (ln_nu, alpha - 0.25)
    } else {
        (1.0 / (p - 4.0), alpha - 1.0 / 3.0 + 1.0 / (3.0 * p))
    };
    Ok(StempakEnvelope {
        upper_log: -alpha * LN_2 + (head + middle + tail).ln() / p + power * ln_nu,
        lower_log: alpha * ln_30 - tail.recip().ln() / p + (alpha - 0.5 + 1.0 / p) * ln_nu,
    })
}

/// The `nu`-power exponent of the upper envelope.
pub fn upper_power(p: f64, alpha: f64) -> f64 {
    if p.is_infinite() {
        alpha - 1.0 / 3.0
    } else if p < 4.0 {
        alpha - 0.5 + 1.0 / p
    } else if p == 4.0 {
        alpha - 0.25
    } else {
        alpha - 1.0 / 3.0 + 1.0 / (3.0 * p)
    }
}
