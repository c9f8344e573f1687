//! Krasikov's uniform oscillatory approximation for `r > 2 nu`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase/amplitude decomposition
/// `J_nu(r) = sqrt(2/pi) cos(B(r) - omega) / (r^2 - mu)^{1/4} + g`,
/// `|g| <= (r^2 - mu)^{-3/4}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrasikovParts {
    /// `nu^2 - 1/4`
    pub mu: f64,
    /// `(2 nu + 1) pi / 4`
    pub omega: f64,
    /// `B(r) = sqrt(r^2 - mu) + sqrt(mu) asin(sqrt(mu) / r)`
    pub phase: f64,
    pub leading: f64,
    /// `(r^2 - mu)^{-3/4}`
    pub g_bound: f64,
}

pub fn krasikov_parts(nu: f64, r: f64) -> Result<KrasikovParts> {
    if !(nu > 0.5) {
        return Err(Error::domain(format!(
            "Krasikov decomposition needs nu > 1/2, got {nu}"
        )));
    }
    if !(r > 2.0 * nu) || !r.is_finite() {
        return Err(Error::domain(format!(
            "Krasikov decomposition needs r > 2 nu = {}, got r = {r}",
            2.0 * nu
        )));
    }
    Ok(parts_unchecked(nu, r))
}

pub(crate) fn parts_unchecked(nu: f64, r: f64) -> KrasikovParts {
    let mu = nu * nu - 0.25;
    let omega = (2.0 * nu + 1.0) * PI / 4.0;
    let phase = phase_fn(mu, r);
    let s = r * r - mu;
    let leading = (2.0 / PI).sqrt() * (phase - omega).cos() / s.powf(0.25);
    KrasikovParts {
        mu,
        omega,
        phase,
        leading,
        g_bound: s.powf(-0.75),
    }
}

/// `B(r)`; the arcsine argument is clamped into `[0, 1]`.
pub(crate) fn phase_fn(mu: f64, r: f64) -> f64 {
    let sm = mu.max(0.0).sqrt();
    (r * r - mu).sqrt() + sm * (sm / r).clamp(0.0, 1.0).asin()
}

/// `B'(r) = sqrt(1 - mu / r^2)`.
pub(crate) fn phase_derivative(mu: f64, r: f64) -> f64 {
    (1.0 - mu / (r * r)).max(0.0).sqrt()
}
