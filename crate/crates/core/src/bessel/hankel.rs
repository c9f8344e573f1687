//! Hankel large-argument expansion
//! `J_nu(r) = sqrt(2/(pi r)) (P cos chi - Q sin chi)`, `chi = r - (nu/2 + 1/4) pi`.
//!
//! Terminates for half-integer order. For real order the remainders of `P`
//! and `Q` are bounded by the first omitted term once the truncation index
//! exceeds `nu/2 - 1/4`; before that index the same quantity is used as an
//! estimate.

use std::f64::consts::PI;

pub(crate) struct HankelEval {
    pub value: f64,
    pub error: f64,
}

const MAX_TERMS: usize = 400;

pub(crate) fn eval(nu: f64, r: f64) -> HankelEval {
    let four_nu2 = 4.0 * nu * nu;
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut abs_sum = 1.0f64;
    let mut term = 1.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut remainder = 0.0;
    let mut exact = false;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let t = term * (four_nu2 - odd * odd) / (8.0 * kf * r);
        if t == 0.0 {
            exact = true;
            break;
        }
        if t.abs() > prev_abs && kf > nu / 2.0 {
            // asymptotic series has started to diverge
            remainder = prev_abs;
            break;
        }
        if t.abs() < 1e-3 * f64::EPSILON * abs_sum {
            remainder = t.abs();
            break;
        }
        // signs follow (-1)^{floor(k/2)}
        let signed = if (k / 2) % 2 == 0 { t } else { -t };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
        abs_sum += t.abs();
        prev_abs = t.abs();
        term = t;
        remainder = t.abs();
        if k == MAX_TERMS - 1 {
            remainder = t.abs();
        }
    }
    if exact {
        remainder = 0.0;
    }
    let (s, c) = shifted_sin_cos(nu, r);
    let amp = (2.0 / (PI * r)).sqrt();
    let value = amp * (p * c - q * s);
    let error = amp * (2.0 * remainder + 4.0 * f64::EPSILON * abs_sum + 4.0 * f64::EPSILON * (p.abs() + q.abs()));
    HankelEval { value, error }
}

/// `sin` and `cos` of `chi = r - (2 nu + 1) pi / 4`, combined from `sin r`,
/// `cos r` and the reduced shift so that no absolute error of order
/// `eps * r` enters through the subtraction.
pub(crate) fn shifted_sin_cos(nu: f64, r: f64) -> (f64, f64) {
    let t = ((2.0 * nu + 1.0) / 4.0) % 2.0;
    let (sp, cp) = (PI * t).sin_cos();
    let (sr, cr) = r.sin_cos();
    (sr * cp - cr * sp, cr * cp + sr * sp)
}

/// Asymptotic modulus squared `M^2 = J^2 + Y^2` times `pi r / 2`, as a power
/// series in `1/r^2`: returns the coefficients `c_k` with
/// `pi r M^2 / 2 ~ sum_k c_k r^{-2k}`, truncated after `n` terms.
pub(crate) fn modulus_sq_coeffs(nu: f64, n: usize) -> Vec<f64> {
    let four_nu2 = 4.0 * nu * nu;
    let mut out = Vec::with_capacity(n);
    let mut c = 1.0f64;
    out.push(c);
    for k in 1..n {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        // (1*3*...*(2k-1)) / (2*4*...*2k) * prod (mu - (2j-1)^2) / 4^k
        c *= odd / (2.0 * kf) * (four_nu2 - odd * odd) / 4.0;
        out.push(c);
    }
    out
}

/// Asymptotic phase `theta(r)` with `J = M cos theta`, `Y = M sin theta`.
/// Returns the phase and the size of the first omitted term.
pub(crate) fn phase(nu: f64, r: f64) -> (f64, f64) {
    let m = 4.0 * nu * nu;
    let z = 4.0 * r;
    let t1 = (m - 1.0) / (2.0 * z);
    let t2 = (m - 1.0) * (m - 25.0) / (6.0 * z.powi(3));
    let t3 = (m - 1.0) * (m * m - 114.0 * m + 1073.0) / (5.0 * z.powi(5));
    let t4 = (m - 1.0) * (5.0 * m.powi(3) - 1535.0 * m * m + 54703.0 * m - 375_733.0) / (14.0 * z.powi(7));
    (r - (0.5 * nu + 0.25) * PI + t1 + t2 + t3 + t4, t4.abs())
}
