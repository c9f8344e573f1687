//! Restriction constants on `S^{d-1}`: exponent regions, the exact radial
//! constant, and the closed-form constants entering the general bounds.
//!
//! Products of powers of `sigma(S^{d-1})`, `nu` and `2 pi` are assembled in
//! log scale and exponentiated once.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{log_sphere_measure, sphere_measure};
use crate::value::{Method, ValueWithError};
use crate::weighted::{weighted_norm, NormQuery, NormResult};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Riesz region of an exponent pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `1 <= p < 2`, `1 <= q < p'`
    A,
    /// `1 < p < 2`, `q >= p'`
    B,
    /// `p >= 2`
    C,
    /// `(p, q) = (1, inf)`
    Corner,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::Corner => "corner",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
    /// `p / (p - 1)`, infinite at `p = 1`.
    pub p_conj: f64,
    pub region: Region,
    /// `p < 2d/(d+1)`: the radial constant is finite.
    pub rad_finite: bool,
    pub d: u32,
}

/// Conjugate exponent.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn check_exponent(name: &str, x: f64) -> Result<()> {
    if !(x >= 1.0) {
        return Err(Error::domain(format!("{name} must lie in [1, inf], got {x}")));
    }
    Ok(())
}

/// Classify `(p, q)` into the Riesz regions; the boundary `q = p'` belongs to B.
pub fn classify(p: f64, q: f64, d: u32) -> Result<ExponentPair> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if d < 2 {
        return Err(Error::domain(format!("dimension must be at least 2, got {d}")));
    }
    let p_conj = conjugate(p);
    let region = if p == 1.0 && q.is_infinite() {
        Region::Corner
    } else if p >= 2.0 {
        Region::C
    } else if q < p_conj * (1.0 - 1e-12) {
        // q = p' up to rounding counts as the boundary
        Region::A
    } else {
        Region::B
    };
    let df = d as f64;
    Ok(ExponentPair {
        p,
        q,
        p_conj,
        region,
        rad_finite: p < 2.0 * df / (df + 1.0),
        d,
    })
}

/// A restriction constant, or the statement that it is infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialValue {
    Finite {
        value: f64,
        log_value: f64,
        rel_error: f64,
    },
    /// Diverges by the finiteness criterion `p < 2d/(d+1)`.
    Infinite {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialConstantResult {
    pub d: u32,
    pub p: f64,
    pub q: f64,
    pub pair: ExponentPair,
    pub value: RadialValue,
    /// `d/2 - (d-1)/p`
    pub alpha_used: f64,
    pub norm_part: Option<NormResult>,
    pub method: Method,
}

impl RadialConstantResult {
    pub fn finite_value(&self) -> Option<f64> {
        match self.value {
            RadialValue::Finite { value, .. } => Some(value),
            RadialValue::Infinite { .. } => None,
        }
    }

    /// `ln` of the constant; `+inf` when it diverges.
    pub fn log_value(&self) -> f64 {
        match self.value {
            RadialValue::Finite { log_value, .. } => log_value,
            RadialValue::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.value, RadialValue::Infinite { .. })
    }
}

/// The exact radial restriction constant
/// `2 pi sigma^{1/q - 1/p} (int_0^inf |J_nu(2 pi r) r^alpha|^{p'} dr)^{1/p'}`,
/// `alpha = d/2 - (d-1)/p`, with the radial integral reduced to
/// `(2 pi)^{-alpha - 1/p'} N(nu, p', alpha)`.
pub fn radial_constant(d: u32, p: f64, q: f64, tol: f64) -> Result<RadialConstantResult> {
    let pair = classify(p, q, d)?;
    let dims = sphere_measure(d)?;
    let df = d as f64;
    let alpha = df / 2.0 - (df - 1.0) / p;
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let base = RadialConstantResult {
        d,
        p,
        q,
        pair,
        value: RadialValue::Infinite { reason: String::new() },
        alpha_used: alpha,
        norm_part: None,
        method: Method::ClosedForm,
    };

    if pair.region == Region::Corner {
        return Ok(RadialConstantResult {
            value: RadialValue::Finite {
                value: 1.0,
                log_value: 0.0,
                rel_error: 0.0,
            },
            ..base
        });
    }
    if !pair.rad_finite {
        let limit = 2.0 * df / (df + 1.0);
        return Ok(RadialConstantResult {
            value: RadialValue::Infinite {
                reason: format!("p >= 2d/(d+1) = {limit}"),
            },
            ..base
        });
    }
    if p == 1.0 {
        // the supremum of |J_nu(s) s^{-nu}| sits at s = 0, giving sigma^{1/q}
        let log_value = inv_q * dims.log_sigma;
        return Ok(RadialConstantResult {
            value: RadialValue::Finite {
                value: log_value.exp(),
                log_value,
                rel_error: 4.0 * f64::EPSILON * (1.0 + log_value.abs()),
            },
            ..base
        });
    }

    let pc = pair.p_conj;
    let nq = NormQuery::new(dims.nu, pc, alpha, tol)?;
    let norm = weighted_norm(&nq)?;
    if !norm.converged {
        return Err(Error::ErrorTooLarge {
            estimate: norm.value,
            bound: norm.rel_error,
            tol,
        });
    }
    let log_value = LN_2PI * (1.0 - alpha - 1.0 / pc) + (inv_q - 1.0 / p) * dims.log_sigma + norm.log_value;
    let rounding = 8.0 * f64::EPSILON * (LN_2PI * (1.0 + alpha.abs()) + dims.log_sigma.abs());
    Ok(RadialConstantResult {
        value: RadialValue::Finite {
            value: log_value.exp(),
            log_value,
            rel_error: norm.rel_error + rounding,
        },
        norm_part: Some(norm),
        method: Method::Quadrature,
        ..base
    })
}

/// `ell_d = sigma^{-1/(d+1)} (2 pi)^{(d-3)/(2(d+1))} nu^{(1-d)/(2(d+1))}` for `d >= 4`.
pub fn ell_d(d: u32) -> Result<ValueWithError> {
    let l = log_ell_d(d)?;
    let v = l.exp();
    Ok(ValueWithError::new(
        v,
        16.0 * f64::EPSILON * v * (1.0 + l.abs()),
        Method::ClosedForm,
    ))
}

pub fn log_ell_d(d: u32) -> Result<f64> {
    if d < 4 {
        return Err(Error::domain(format!("ell_d requires d >= 4, got {d}")));
    }
    let df = d as f64;
    let nu = df / 2.0 - 1.0;
    let k = 2.0 * (df + 1.0);
    Ok(-log_sphere_measure(d) / (df + 1.0) + (df - 3.0) / k * LN_2PI + (1.0 - df) / k * nu.ln())
}

/// Sharp one-dimensional Hardy–Littlewood–Sobolev constant
/// `L(lambda) = pi^{lambda/2} Gamma((1-lambda)/2) / Gamma(1 - lambda/2) * pi^{(lambda-1)/2}`.
pub fn hls_constant(lambda: f64) -> Result<ValueWithError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(format!(
            "HLS constant requires 0 < lambda < 1, got {lambda}"
        )));
    }
    let ln_pi = PI.ln();
    let a = crate::gamma::ln_gamma((1.0 - lambda) / 2.0)?;
    let b = crate::gamma::ln_gamma(1.0 - lambda / 2.0)?;
    let l = lambda / 2.0 * ln_pi + a.value - b.value + (lambda - 1.0) / 2.0 * ln_pi;
    let v = l.exp();
    Ok(ValueWithError::new(
        v,
        v * (a.error + b.error + 8.0 * f64::EPSILON * (1.0 + l.abs())),
        Method::Stirling,
    ))
}

/// `C_d`, the kernel-decay threshold `tau_*` and the interpolated constant
/// `4^{1/p'} C_d^{2/p - 1}` at the endpoint `p = p_*(d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConstant {
    pub d: u32,
    pub c_bullet: f64,
    pub log_c_d: f64,
    pub tau_star: f64,
    pub log_composite: f64,
}

impl PropagatorConstant {
    pub fn c_d(&self) -> f64 {
        self.log_c_d.exp()
    }

    pub fn composite(&self) -> f64 {
        self.log_composite.exp()
    }

    /// `ln` of both branches of `<tau>^{(d-1)/2} min{sigma, C nu^{1/6} |tau|^{(1-d)/2}}`:
    /// `sigma <tau>^{(d-1)/2}` and `C nu^{1/6} (|tau| / <tau>)^{(1-d)/2}`.
    pub fn branches_log(&self, tau: f64) -> (f64, f64) {
        let df = self.d as f64;
        let nu = df / 2.0 - 1.0;
        let h = (df - 1.0) / 2.0;
        let t = tau.abs();
        let ln_br = t.hypot(1.0).ln();
        let left = log_sphere_measure(self.d) + h * ln_br;
        let right = self.c_bullet.ln() + nu.ln() / 6.0 - h * (t.ln() - ln_br);
        (left, right)
    }

    /// `ln` of the decay profile, the smaller branch.
    pub fn profile_log(&self, tau: f64) -> f64 {
        let (l, r) = self.branches_log(tau);
        if tau.abs() <= self.tau_star {
            l
        } else {
            r
        }
    }
}

/// `C_d = sigma <(c_bullet nu^{1/6} / sigma)^{2/(d-1)}>^{(d-1)/2}` with
/// `<x> = (1 + x^2)^{1/2}`.
pub fn propagator_constant(d: u32, c_bullet: f64) -> Result<PropagatorConstant> {
    if d < 2 {
        return Err(Error::domain(format!("dimension must be at least 2, got {d}")));
    }
    if !(c_bullet > 0.0) || !c_bullet.is_finite() {
        return Err(Error::domain(format!("c_bullet must be positive, got {c_bullet}")));
    }
    let df = d as f64;
    let nu = df / 2.0 - 1.0;
    let log_sigma = log_sphere_measure(d);
    let log_top = c_bullet.ln() + nu.ln() / 6.0;
    let ln_x = 2.0 / (df - 1.0) * (log_top - log_sigma);
    let quarter = (df - 1.0) / 4.0;
    let log_c_d = if ln_x > 0.0 {
        log_top + quarter * (-2.0 * ln_x).exp().ln_1p()
    } else {
        log_sigma + quarter * (2.0 * ln_x).exp().ln_1p()
    };
    let log_composite = LN_2 * 2.0 * (df - 1.0) / (2.0 * (df + 1.0)) + 2.0 / (df + 1.0) * log_c_d;
    Ok(PropagatorConstant {
        d,
        c_bullet,
        log_c_d,
        tau_star: ln_x.exp(),
        log_composite,
    })
}

/// The kernel `2 cos(2 pi tau sqrt(1 - |x'|^2))` on the unit ball, zero outside.
pub fn kernel_k(x_norm: f64, tau: f64) -> f64 {
    if x_norm <= 1.0 {
        2.0 * (2.0 * PI * tau * (1.0 - x_norm * x_norm).max(0.0).sqrt()).cos()
    } else {
        0.0
    }
}

/// `1/q(p) = 1 + 1/(d+1) - 1/p`.
pub fn q_of_p(d: u32, p: f64) -> f64 {
    1.0 / (1.0 + 1.0 / (d as f64 + 1.0) - 1.0 / p)
}

/// Interpolation parameter with `theta/(d+1) = 2/(d-1) (1/p - 1/p_*)`.
pub fn theta(d: u32, p: f64) -> f64 {
    let df = d as f64;
    let p_star = 2.0 * (df + 1.0) / (df + 3.0);
    (df + 1.0) * 2.0 / (df - 1.0) * (1.0 / p - 1.0 / p_star)
}

/// Exponents of `sigma` and of `C sqrt(d)` in the interpolation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundExponents {
    pub sigma_first: f64,
    pub sigma_second: f64,
    pub c_sqrt_d: f64,
    pub theta: f64,
}

pub fn bound_exponents(d: u32, p: f64, q: f64) -> BoundExponents {
    let df = d as f64;
    let p_star = 2.0 * (df + 1.0) / (df + 3.0);
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let gap = 1.0 / p - 1.0 / p_star;
    BoundExponents {
        sigma_first: 1.0 / p + inv_q - 1.0 - 1.0 / (df + 1.0),
        sigma_second: 2.0 / (df - 1.0) * gap,
        c_sqrt_d: 1.0 - 2.0 * (df + 1.0) / (df - 1.0) * gap,
        theta: theta(d, p),
    }
}

/// `ln` of the interpolation bound
/// `sigma^{1/p + 1/q - 1 - 1/(d+1)} sigma^{2/(d-1) (1/p - 1/p_*)} (C sqrt d)^{1 - 2 (d+1)/(d-1) (1/p - 1/p_*)}`.
///
/// Requires `(p, q)` in region A, `p <= p_*(d)` and `1/p + 1/q - 1 > 1/(d+1)`.
pub fn general_upper_bound_log(d: u32, p: f64, q: f64, stein_tomas_c: f64) -> Result<f64> {
    let pair = classify(p, q, d)?;
    if pair.region != Region::A {
        return Err(Error::domain(format!(
            "(p, q) = ({p}, {q}) is in region {}, not A",
            pair.region
        )));
    }
    if d < 3 {
        return Err(Error::domain(format!("the interpolation bound needs d >= 3, got {d}")));
    }
    if !(stein_tomas_c > 0.0) || !stein_tomas_c.is_finite() {
        return Err(Error::domain(format!(
            "Stein-Tomas constant must be positive, got {stein_tomas_c}"
        )));
    }
    let df = d as f64;
    let p_star = 2.0 * (df + 1.0) / (df + 3.0);
    if p > p_star {
        return Err(Error::domain(format!(
            "p = {p} exceeds p_*(d) = {p_star}; d is too small"
        )));
    }
    let e = bound_exponents(d, p, q);
    if !(e.sigma_first > 0.0) {
        return Err(Error::domain(format!(
            "1/p + 1/q - 1 must exceed 1/(d+1) = {}; d is too small",
            1.0 / (df + 1.0)
        )));
    }
    let ls = log_sphere_measure(d);
    Ok((e.sigma_first + e.sigma_second) * ls + e.c_sqrt_d * (stein_tomas_c.ln() + 0.5 * df.ln()))
}

pub fn general_upper_bound(d: u32, p: f64, q: f64, stein_tomas_c: f64) -> Result<ValueWithError> {
    let l = general_upper_bound_log(d, p, q, stein_tomas_c)?;
    let v = l.exp();
    Ok(ValueWithError::new(
        v,
        16.0 * f64::EPSILON * v * (1.0 + l.abs()),
        Method::ClosedForm,
    ))
}

/// `(1/d) L((d-1)/(d+1))`.
pub fn hls_normalized(d: u32) -> Result<ValueWithError> {
    let df = d as f64;
    let l = hls_constant((df - 1.0) / (df + 1.0))?;
    Ok(ValueWithError::new(l.value / df, l.error / df, l.method))
}
