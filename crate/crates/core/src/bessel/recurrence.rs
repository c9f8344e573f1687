//! Continued fraction for `J_{nu-1}/J_nu` followed by downward recurrence to
//! the fractional order `nu0 = nu - floor(nu)`, normalized against directly
//! evaluated `J_{nu0}` and `J_{nu0+1}`.

pub(crate) struct RecurrenceEval {
    pub value: f64,
    pub error: f64,
    /// `ln |J_nu|`, finite even when `value` underflows.
    pub ln_abs: f64,
    pub converged: bool,
}

const RESCALE: f64 = 1e250;
const TINY: f64 = 1e-300;

/// `J_{nu-1}(r) / J_nu(r)` by modified Lentz. Returns the ratio and the
/// number of iterations, or `None` without convergence.
fn cf_ratio(nu: f64, r: f64) -> Option<(f64, usize)> {
    let max_iter = 200_000 + 4 * r as usize;
    let b = |k: usize| 2.0 * (nu + k as f64) / r;
    let mut f = b(0);
    if f == 0.0 {
        f = TINY;
    }
    let mut c = f;
    let mut d = 0.0;
    for j in 1..max_iter {
        let bj = b(j);
        d = bj - d;
        if d == 0.0 {
            d = TINY;
        }
        c = bj - 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 0.5 * f64::EPSILON {
            return Some((f, j));
        }
    }
    None
}

/// `low(order)` must return `(J_order(r), abs error)` for `order < 2`.
pub(crate) fn eval<L>(nu: f64, r: f64, low: L) -> RecurrenceEval
where
    L: Fn(f64) -> (f64, f64),
{
    let steps = nu.floor();
    let nu0 = nu - steps;
    if steps < 1.0 {
        let (v, e) = low(nu);
        return RecurrenceEval {
            value: v,
            error: e,
            ln_abs: v.abs().ln(),
            converged: true,
        };
    }
    if r >= nu {
        return upward(r, nu0, steps, low);
    }
    let Some((ratio, iters)) = cf_ratio(nu, r) else {
        return RecurrenceEval {
            value: 0.0,
            error: f64::INFINITY,
            ln_abs: f64::NEG_INFINITY,
            converged: false,
        };
    };
    // t_nu = 1, t_{nu-1} = ratio
    let mut hi = 1.0f64;
    let mut cur = ratio;
    let mut order = nu - 1.0;
    let mut shift = 0.0f64;
    while order > nu0 + 1.5 {
        let f = 2.0 * order / r;
        if cur.abs() > 1.0 && cur.abs() * f > RESCALE {
            let m = cur.abs();
            hi /= m;
            cur /= m;
            shift += m.ln();
        }
        let next = f * cur - hi;
        hi = cur;
        cur = next;
        order -= 1.0;
    }
    let (t0, t1) = if steps == 1.0 {
        (cur, hi)
    } else {
        (2.0 * (nu0 + 1.0) / r * cur - hi, cur)
    };
    let big = t0.abs().max(t1.abs());
    let (t0, t1) = (t0 / big, t1 / big);
    shift += big.ln();
    let (c0, e0) = low(nu0);
    let (c1, e1) = low(nu0 + 1.0);
    let norm2 = t0 * t0 + t1 * t1;
    let s = (c0 * t0 + c1 * t1) / norm2;
    let s_err = (t0.abs() * e0 + t1.abs() * e1) / norm2;
    // J_nu = s * exp(-shift) * t_nu with t_nu = 1
    let ln_abs = s.abs().ln() - shift;
    let value = if shift != 0.0 { ln_abs.exp().copysign(s) } else { s };
    let mag = (c0 * c0 + c1 * c1).sqrt();
    let rounding = 4.0 * f64::EPSILON * (steps + (iters as f64).sqrt() + 10.0);
    let oscill = if r > nu { mag } else { value.abs() };
    let error = s_err * (-shift).exp() + rounding * (value.abs() + oscill);
    RecurrenceEval {
        value,
        error,
        ln_abs,
        converged: true,
    }
}

/// Upward recurrence from `nu0`, stable while the order stays below `r`.
/// Initial errors are propagated exactly through the two fundamental
/// sequences started from `(1, 0)` and `(0, 1)`.
fn upward<L>(r: f64, nu0: f64, steps: f64, low: L) -> RecurrenceEval
where
    L: Fn(f64) -> (f64, f64),
{
    let (c0, e0) = low(nu0);
    let (c1, e1) = low(nu0 + 1.0);
    let (mut a0, mut a1) = (c0, c1);
    let (mut u0, mut u1) = (1.0f64, 0.0f64);
    let (mut v0, mut v1) = (0.0f64, 1.0f64);
    let mut peak = a0.abs().max(a1.abs());
    let mut order = nu0 + 1.0;
    let n = steps as usize;
    for _ in 1..n {
        let f = 2.0 * order / r;
        (a0, a1) = (a1, f * a1 - a0);
        (u0, u1) = (u1, f * u1 - u0);
        (v0, v1) = (v1, f * v1 - v0);
        peak = peak.max(a1.abs());
        order += 1.0;
    }
    let value = a1;
    let error = e0 * u1.abs() + e1 * v1.abs() + 4.0 * f64::EPSILON * (steps + 4.0) * peak;
    RecurrenceEval {
        value,
        error,
        ln_abs: value.abs().ln(),
        converged: true,
    }
}
