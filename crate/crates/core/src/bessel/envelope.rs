//! Pointwise uniform envelopes for `|J_nu(r)|`, in log scale.

use serde::{Deserialize, Serialize};

use crate::gamma::lgamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    /// `r^nu / (2^nu nu!)`, all `nu >= 0`, `r > 0`; constant exactly 1.
    SeriesBound,
    /// `r^{-1/2}` for `nu >= 1/2`, `r > 2 nu`; constant exactly 1.
    TailBound,
    /// `nu^{-1/4} (|r - nu| + nu^{1/3})^{-1/4}` for `nu >= 2`, `nu/2 < r < 2 nu`.
    TransitionBound,
    /// `nu^{1/6} r^{-1/2}` for `nu >= 1`.
    GlobalHalfPower,
}

impl EnvelopeKind {
    /// Whether the envelope's absolute constant is known to be 1.
    pub fn explicit_constant(self) -> bool {
        matches!(self, EnvelopeKind::SeriesBound | EnvelopeKind::TailBound)
    }
}

/// An envelope value. Envelopes whose absolute constant is unnamed carry the
/// constant 1; the verifier measures the implied constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub kind: EnvelopeKind,
    pub value_log: f64,
}

pub fn series_bound_log(nu: f64, r: f64) -> f64 {
    nu * r.ln() - nu * std::f64::consts::LN_2 - lgamma(nu + 1.0)
}

pub fn tail_bound_log(r: f64) -> f64 {
    -0.5 * r.ln()
}

pub fn transition_bound_log(nu: f64, r: f64) -> f64 {
    -0.25 * nu.ln() - 0.25 * ((r - nu).abs() + nu.cbrt()).ln()
}

pub fn global_half_power_log(nu: f64, r: f64) -> f64 {
    nu.ln() / 6.0 - 0.5 * r.ln()
}

/// Every envelope whose domain contains `(nu, r)`.
pub fn envelopes(nu: f64, r: f64) -> Vec<Envelope> {
    let mut out = Vec::with_capacity(4);
    if !(nu >= 0.0 && r > 0.0) {
        return out;
    }
    out.push(Envelope {
        kind: EnvelopeKind::SeriesBound,
        value_log: series_bound_log(nu, r),
    });
    if nu >= 0.5 && r > 2.0 * nu {
        out.push(Envelope {
            kind: EnvelopeKind::TailBound,
            value_log: tail_bound_log(r),
        });
    }
    if nu >= 2.0 && r > nu / 2.0 && r < 2.0 * nu {
        out.push(Envelope {
            kind: EnvelopeKind::TransitionBound,
            value_log: transition_bound_log(nu, r),
        });
    }
    if nu >= 1.0 {
        out.push(Envelope {
            kind: EnvelopeKind::GlobalHalfPower,
            value_log: global_half_power_log(nu, r),
        });
    }
    out
}
