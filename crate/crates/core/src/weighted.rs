//! Weighted Bessel norms `N(nu, p, alpha) = (int_0^inf |J_nu(r) r^alpha|^p dr)^{1/p}`
//! and the sup-norm `sup_r |J_nu(r) r^alpha|`.
//!
//! The integral is split into a head `[0, nu/2]`, a bulk `[nu/2, 2 nu]`, a
//! quadrature tail `[2 nu, R]` and an analytic tail `[R, inf)`. All integrand
//! values are carried relative to a common scale `exp(log_scale)` so that
//! neither the exponentially small head for large `nu` nor large weights
//! leave the range of a double.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{hankel_phase, ln_abs_j, modulus_sq_coeffs, series_bound_log, zeros_between};
use crate::error::{Error, Result};
use crate::gamma::lgamma;
use crate::quad::{integrate, Integrator, Target};
use crate::value::{Method, ValueWithError};

/// Accuracy requested from individual Bessel evaluations.
const J_TOL: f64 = 1e-13;
const DEFAULT_MAX_PANELS: usize = 400_000;
/// Beyond this the tail cutoff is not extended further and the result is
/// flagged unconverged.
const R_TAIL_MAX: f64 = 2e6;
/// Terms kept in the asymptotic tail series.
const TAIL_TERMS: usize = 8;
/// Above this exponent the integrand is a narrow spike around the maximum of
/// `|J_nu(r) r^alpha|`, which then sets the scale and the breakpoints.
const LARGE_P: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormQuery {
    pub nu: f64,
    /// `p` in `[1, inf]`; `f64::INFINITY` selects the sup-norm.
    pub p: f64,
    pub alpha: f64,
    /// Relative tolerance on the norm.
    pub tol: f64,
}

impl NormQuery {
    pub fn new(nu: f64, p: f64, alpha: f64, tol: f64) -> Result<Self> {
        let q = Self { nu, p, alpha, tol };
        q.validate()?;
        Ok(q)
    }

    /// Checks the convergence conditions `-nu - 1/p < alpha < 1/2 - 1/p`
    /// (`-nu < alpha < 1/2` for `p = inf`).
    pub fn validate(&self) -> Result<()> {
        self.validate_with(true)
    }

    /// With `at_infinity = false` only the condition at the origin is
    /// checked, as needed on a bounded interval.
    fn validate_with(&self, at_infinity: bool) -> Result<()> {
        let Self { nu, p, alpha, tol } = *self;
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("order must satisfy nu >= 0, got {nu}")));
        }
        if !(p >= 1.0) {
            return Err(Error::domain(format!("exponent must satisfy p >= 1, got {p}")));
        }
        if !alpha.is_finite() {
            return Err(Error::domain(format!("weight exponent must be finite, got {alpha}")));
        }
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::parameter(format!("tol must lie in (0, 1e-2], got {tol:e}")));
        }
        let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
        let lower = -nu - inv_p;
        let upper = 0.5 - inv_p;
        if !(alpha > lower) {
            return Err(Error::domain(format!(
                "alpha = {alpha} violates -nu - 1/p < alpha (lower limit {lower}); the integral diverges at 0"
            )));
        }
        if at_infinity && !(alpha < upper) {
            return Err(Error::domain(format!(
                "alpha = {alpha} violates alpha < 1/2 - 1/p = {upper}; the integral diverges at infinity"
            )));
        }
        Ok(())
    }
}

/// One piece of the integral `int |J_nu r^alpha|^p`, in units of `exp(log_scale)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Segments {
    /// `[0, nu/2]`
    pub head: Segment,
    /// `[nu/2, 2 nu]`
    pub bulk: Segment,
    /// `[2 nu, R]`
    pub tail_quadrature: Segment,
    /// `[R, inf)`
    pub tail_bound: Segment,
}

impl Segments {
    pub fn all(&self) -> [&Segment; 4] {
        [&self.head, &self.bulk, &self.tail_quadrature, &self.tail_bound]
    }
}

/// How the part of the integral beyond `R` was accounted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// Bounded by `int_R^inf r^{p(alpha - 1/2)} dr` from `|J_nu(r)| <= r^{-1/2}`.
    Envelope,
    /// Mean value of `|cos|^p` against the asymptotic modulus, with a bound
    /// on the oscillatory remainder.
    Asymptotic,
    /// Finite upper limit, no tail.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub query: NormQuery,
    /// The norm; may underflow or overflow, see `log_value`.
    pub value: f64,
    /// `ln` of the norm.
    pub log_value: f64,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
    /// Natural log of the unit in which segment values are expressed.
    pub log_scale: f64,
    pub segments: Segments,
    pub r_tail: f64,
    pub tail_mode: TailMode,
    pub converged: bool,
    pub panels: usize,
}

impl NormResult {
    /// Sum of segment values, i.e. `value^p / exp(log_scale)`.
    pub fn segment_sum(&self) -> f64 {
        let mut s = crate::sum::CompensatedSum::new();
        for seg in self.segments.all() {
            s.add(seg.value);
        }
        s.value()
    }

    /// Sum of segment errors, in the same units.
    pub fn segment_error(&self) -> f64 {
        self.segments.all().iter().map(|s| s.error).sum()
    }

    /// `ln(value^p)`.
    pub fn log_integral(&self) -> f64 {
        self.log_scale + self.segment_sum().ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormOptions {
    pub max_panels: usize,
    /// Fix the tail cutoff instead of choosing it from the tolerance.
    pub r_tail: Option<f64>,
    /// Integrate over `[0, upper_limit]` only.
    pub upper_limit: Option<f64>,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            max_panels: DEFAULT_MAX_PANELS,
            r_tail: None,
            upper_limit: None,
        }
    }
}

pub fn weighted_norm(q: &NormQuery) -> Result<NormResult> {
    weighted_norm_with(q, &NormOptions::default())
}

struct Setup {
    nu: f64,
    p: f64,
    alpha: f64,
    log_scale: f64,
}

impl Setup {
    /// `p ln|J_nu(r)| + alpha p ln r - log_scale`
    fn log_integrand(&self, r: f64) -> f64 {
        self.log_integrand_ln(r, r.ln())
    }

    /// As [`Self::log_integrand`] with `ln r` supplied, so that `r` may
    /// underflow.
    fn log_integrand_ln(&self, r: f64, ln_r: f64) -> f64 {
        let ln_j = if r < 1e-100 {
            // leading series term; the relative correction is O(r^2)
            self.nu * (ln_r - std::f64::consts::LN_2) - lgamma(self.nu + 1.0)
        } else {
            ln_abs_j(self.nu, r, J_TOL)
        };
        self.p * ln_j + self.alpha * self.p * ln_r - self.log_scale
    }

    fn integrand(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.log_integrand(r).exp()
    }
}

pub fn weighted_norm_with(q: &NormQuery, opts: &NormOptions) -> Result<NormResult> {
    let (nu, p, alpha, tol) = (q.nu, q.p, q.alpha, q.tol);
    if p.is_infinite() {
        return Err(Error::domain("p = inf is the sup-norm; use weighted_sup"));
    }
    if let Some(u) = opts.upper_limit {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::domain(format!(
                "upper limit must be positive and finite, got {u}"
            )));
        }
    }
    q.validate_with(opts.upper_limit.is_none())?;

    let tol_i = (p * tol).min(0.5);
    // exponent of the envelope near the origin, and of r^{p(alpha-1/2)} + 1
    let s_head = (nu + alpha) * p + 1.0;
    let s_tail = p * (alpha - 0.5) + 1.0;
    let upper = opts.upper_limit.unwrap_or(f64::INFINITY);

    let half = 0.5 * nu;
    let two = 2.0 * nu;
    let spike = if p > LARGE_P { peak(nu, alpha, upper) } else { None };
    let mut log_scale = choose_log_scale(nu, p, alpha, upper);
    if let Some((_, g)) = spike {
        log_scale = log_scale.max(p * g);
    }
    let setup = Setup {
        nu,
        p,
        alpha,
        log_scale,
    };

    // first panel [0, r0] in the variable u = r^{s_head}
    let mut r0 = if nu > 0.0 { half.min(1.0) } else { 1.0 }.min(upper);
    if let Some((rp, _)) = spike {
        r0 = r0.min(rp / 64.0);
    }
    let sub = {
        let u_max = r0.powf(s_head);
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let ln_u = u.ln();
            let ln_r = ln_u / s_head;
            (setup.log_integrand_ln(ln_r.exp(), ln_r) - s_head.ln() + (1.0 / s_head - 1.0) * ln_u).exp()
        };
        move |target: Target| integrate(f, &[0.0, u_max], target, 20_000)
    };

    // breakpoints in r beyond r0
    let mut head_pts = vec![r0];
    let mut x = r0;
    while 2.0 * x < half.min(upper) {
        x *= 2.0;
        head_pts.push(x);
    }
    if half > r0 && half <= upper {
        head_pts.push(half);
    }
    let head_end = *head_pts.last().unwrap();

    let mut core_pts = vec![head_end];
    for b in [nu, two] {
        if b > head_end && b < upper {
            core_pts.push(b);
        }
    }
    let first_stop = if upper.is_finite() {
        upper
    } else {
        (4.0 * nu).max(two + 20.0)
    };
    extend_oscillatory(&mut core_pts, nu, first_stop);
    if let Some((rp, _)) = spike {
        let w = 1.0 / (p * (1.0 - (nu * nu - alpha * alpha) / (rp * rp)).abs().max(1e-6)).sqrt();
        let mut extra: Vec<f64> = (-6..=6).map(|k| rp * 2f64.powi(k)).collect();
        for k in 0..=8 {
            let o = w * 2f64.powi(k);
            extra.extend([rp - o, rp + o]);
        }
        insert_points(&mut head_pts, &extra);
        insert_points(&mut core_pts, &extra);
    }

    let mut integ = Integrator::new(|r: f64| setup.integrand(r), opts.max_panels);
    integ.add_breakpoints(&core_pts);
    let quad_target = Target {
        abs: 0.0,
        rel: tol_i / 2.0,
    };
    let (mut est, _) = integ.refine(quad_target);
    // contribution of the singular first panel when it is not part of the head
    let sub_first = if nu == 0.0 {
        let r = sub(Target {
            abs: 0.0,
            rel: tol_i / 8.0,
        });
        est += r.value;
        Some(r)
    } else {
        None
    };

    // tail
    let mut tail_mode = TailMode::None;
    let mut r_tail = upper;
    let mut tail_seg = Segment {
        lo: upper,
        hi: upper,
        ..Default::default()
    };
    let mut converged = true;
    if upper.is_infinite() {
        let goal = tol_i * est.max(f64::MIN_POSITIVE) / 4.0;
        let log_goal = goal.ln() + log_scale;
        let env_r = |log_goal: f64| ((-s_tail).ln() + log_goal) / s_tail;
        let (mode, r) = match opts.r_tail {
            Some(r) => {
                let env = s_tail * r.ln() - (-s_tail).ln();
                if env <= log_goal {
                    (TailMode::Envelope, r)
                } else {
                    (TailMode::Asymptotic, r)
                }
            }
            None => {
                let r_env = env_r(log_goal).exp();
                if r_env <= (40.0 * nu).max(400.0) {
                    (TailMode::Envelope, r_env.max(two).max(first_stop))
                } else {
                    let r = asymptotic_cutoff(nu, p, s_tail, log_goal);
                    (TailMode::Asymptotic, r.max(first_stop))
                }
            }
        };
        let r = if mode == TailMode::Asymptotic {
            snap_to_phase(nu, r)
        } else {
            r
        };
        tail_mode = mode;
        r_tail = r;
        let last = *core_pts.last().unwrap();
        let mut more = vec![last];
        extend_oscillatory(&mut more, nu, r.max(last));
        if r < last {
            converged = false;
        }
        integ.add_breakpoints(&more);
        tail_seg = match mode {
            TailMode::Envelope => {
                let b = (s_tail * r.ln() - (-s_tail).ln() - log_scale).exp();
                Segment {
                    lo: r,
                    hi: f64::INFINITY,
                    value: 0.5 * b,
                    error: 0.5 * b,
                }
            }
            _ => {
                let (v, e) = asymptotic_tail(nu, p, s_tail, r);
                let (v, e) = ((v.ln() - log_scale).exp(), (e.ln() - log_scale).exp());
                Segment {
                    lo: r,
                    hi: f64::INFINITY,
                    value: v,
                    error: e,
                }
            }
        };
        if r > R_TAIL_MAX {
            converged = false;
        }
    }

    let (mut est2, _) = integ.refine(quad_target);
    if let Some(r) = &sub_first {
        est2 += r.value;
    }
    est2 += tail_seg.value;

    // head: analytic skip or quadrature
    let head_bound_log =
        -p * (nu * std::f64::consts::LN_2 + lgamma(nu + 1.0)) + s_head * head_end.ln() - s_head.ln() - log_scale;
    let head_goal = tol_i * est2 / 4.0;
    let mut head_seg = Segment {
        lo: 0.0,
        hi: head_end,
        ..Default::default()
    };
    let mut head_panels = 0;
    if nu > 0.0 {
        if head_bound_log < head_goal.ln() {
            let b = head_bound_log.exp();
            head_seg.value = 0.5 * b;
            head_seg.error = 0.5 * b;
        } else {
            // the head may dominate the integral, so the target is also relative
            let target = Target {
                abs: head_goal / 2.0,
                rel: tol_i / 8.0,
            };
            let r = sub(target);
            head_panels += r.panels.len();
            let mut rest = Integrator::new(|r: f64| setup.integrand(r), opts.max_panels);
            rest.add_breakpoints(&head_pts);
            rest.refine(target);
            let rest = rest.finish(target);
            head_panels += rest.panels.len();
            head_seg.value = r.value + rest.value;
            head_seg.error = r.error + rest.error;
            converged &= r.converged && rest.converged;
        }
    }

    let quad = integ.finish(quad_target);
    converged &= quad.converged;
    let (bulk_v, bulk_e) = quad.part(head_end, two.max(head_end));
    let (tq_v, tq_e) = quad.part(two.max(head_end), r_tail);
    let mut tail_q = Segment {
        lo: two.max(head_end).min(r_tail),
        hi: r_tail,
        value: tq_v,
        error: tq_e,
    };
    if let Some(r) = &sub_first {
        tail_q.lo = 0.0;
        tail_q.value += r.value;
        tail_q.error += r.error;
        converged &= r.converged;
    }
    let segments = Segments {
        head: head_seg,
        bulk: Segment {
            lo: head_end,
            hi: two.max(head_end).min(r_tail),
            value: bulk_v,
            error: bulk_e,
        },
        tail_quadrature: tail_q,
        tail_bound: tail_seg,
    };
    let mut res = NormResult {
        query: *q,
        value: 0.0,
        log_value: 0.0,
        rel_error: 0.0,
        log_scale,
        segments,
        r_tail,
        tail_mode,
        converged,
        panels: quad.panels.len() + head_panels + sub_first.as_ref().map_or(0, |r| r.panels.len()),
    };
    let total = res.segment_sum();
    let err = res.segment_error();
    res.log_value = (log_scale + total.ln()) / p;
    res.value = res.log_value.exp();
    res.rel_error = err / total / p;
    res.converged &= res.rel_error <= tol && total > 0.0;
    Ok(res)
}

/// Location and value of the maximum of `ln|J_nu(r)| + alpha ln r` on
/// `(0, upper]`, searched in `ln r`; `None` when it sits at the origin.
fn peak(nu: f64, alpha: f64, upper: f64) -> Option<(f64, f64)> {
    let g = |t: f64| ln_abs_j(nu, t.exp(), J_TOL) + alpha * t;
    let a = (1e-12 * nu.max(1.0)).ln();
    let b = (8.0 * nu + 40.0).min(upper).ln();
    if !(b > a) {
        return None;
    }
    let (t, v) = grid_search(&g, a, b, 0.02);
    (t > a + 0.02 && v.is_finite()).then(|| (t.exp(), v))
}

/// Add the points strictly inside the span of the sorted list `pts`.
fn insert_points(pts: &mut Vec<f64>, extra: &[f64]) {
    let (lo, hi) = (pts[0], *pts.last().unwrap());
    pts.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
}

/// Maximum of the log-integrand over a coarse sample, used as the common
/// scale. Only needs to be within a few hundred of the true log-integral.
fn choose_log_scale(nu: f64, p: f64, alpha: f64, upper: f64) -> f64 {
    let scale = nu.max(1.0);
    let mut best = f64::NEG_INFINITY;
    let mut consider = |r: f64| {
        if r > 0.0 && r <= upper && r.is_finite() {
            let v = p * ln_abs_j(nu, r, J_TOL) + alpha * p * r.ln();
            if v.is_finite() {
                best = best.max(v);
            }
        }
    };
    for k in 0..=60 {
        consider(1e-3 * scale * (4e3f64).powf(k as f64 / 60.0));
    }
    for r in [0.5 * nu, nu, nu + 0.8 * nu.cbrt(), 2.0 * nu, upper] {
        consider(r);
    }
    if best.is_finite() {
        best
    } else {
        series_bound_log(nu, 1.0) * p
    }
}

/// Append breakpoints after the current last point up to `stop`: zeros of
/// `J_nu` and extra points so that no panel is longer than `pi`.
fn extend_oscillatory(pts: &mut Vec<f64>, nu: f64, stop: f64) {
    let start = *pts.last().unwrap();
    if !(stop > start) {
        return;
    }
    let zeros = zeros_between(nu, start, stop);
    let mut prev = start;
    for z in zeros.into_iter().chain(std::iter::once(stop)) {
        let gap = z - prev;
        if gap > PI {
            let n = (gap / PI).ceil() as usize;
            for k in 1..n {
                pts.push(prev + gap * k as f64 / n as f64);
            }
        }
        if z - prev > 1e-12 * z {
            pts.push(z);
            prev = z;
        }
    }
}

/// `m_p = (1/pi) int_0^pi |cos t|^p dt`.
pub fn mean_abs_cos_pow(p: f64) -> f64 {
    (lgamma(0.5 * (p + 1.0)) - 0.5 * PI.ln() - lgamma(0.5 * p + 1.0)).exp()
}

/// Coefficients of `(sum_k c_k y^k)^{p/2}` for the asymptotic modulus.
fn tail_coeffs(nu: f64, p: f64) -> Vec<f64> {
    let a = modulus_sq_coeffs(nu, TAIL_TERMS + 1);
    let m = 0.5 * p;
    let mut b = vec![1.0; a.len()];
    for n in 1..a.len() {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += ((m + 1.0) * k as f64 - n as f64) * a[k] * b[n - k];
        }
        b[n] = acc / n as f64;
    }
    b
}

/// Asymptotic tail `int_R^inf |J_nu(r)|^p r^{alpha p} dr` and its error,
/// unscaled. Requires `R` to be a node of the phase (see [`snap_to_phase`]).
fn asymptotic_tail(nu: f64, p: f64, s: f64, r: f64) -> (f64, f64) {
    let b = tail_coeffs(nu, p);
    let pre = mean_abs_cos_pow(p) * (2.0 / PI).powf(0.5 * p);
    let mut v = 0.0;
    let mut last = 0.0;
    for (n, bn) in b.iter().enumerate() {
        let term = bn * r.powf(s - 2.0 * n as f64) / (2.0 * n as f64 - s);
        if n + 1 < b.len() {
            v += term;
        } else {
            last = term.abs();
        }
    }
    let value = pre * v;
    let trunc = 2.0 * pre * last;
    let osc = oscillation_bound(p, s, r);
    let (_, phase_err) = hankel_phase(nu, r);
    let boundary = (2.0 / PI).powf(0.5 * p) * r.powf(s - 1.0) * phase_err;
    (value, trunc + osc + boundary + 4.0 * f64::EPSILON * value)
}

/// Bound on the oscillatory remainder beyond a phase node `R`.
fn oscillation_bound(p: f64, s: f64, r: f64) -> f64 {
    1.25 * PI * PI / 2.0 * (1.0 - s) * (2.0 / PI).powf(0.5 * p) * r.powf(s - 2.0)
}

/// Smallest admissible cutoff for the asymptotic tail, in log scale target.
fn asymptotic_cutoff(nu: f64, p: f64, s: f64, log_goal: f64) -> f64 {
    let floor = (16.0 * nu).max(30.0);
    // oscillation_bound(R) = goal
    let c = (1.25 * PI * PI / 2.0 * (1.0 - s) * (2.0 / PI).powf(0.5 * p)).ln();
    let r = ((c - log_goal) / (2.0 - s)).exp();
    r.max(floor).min(R_TAIL_MAX * 1.5)
}

/// Move `r` up to the nearest point where the asymptotic phase is a
/// multiple of `pi/2`.
fn snap_to_phase(nu: f64, r: f64) -> f64 {
    let (th, _) = hankel_phase(nu, r);
    let target = (th / (0.5 * PI)).ceil() * 0.5 * PI;
    let mut x = r + (target - th);
    for _ in 0..20 {
        let (t, _) = hankel_phase(nu, x);
        let h = 1e-6 * x;
        let d = (hankel_phase(nu, x + h).0 - hankel_phase(nu, x - h).0) / (2.0 * h);
        let dx = (t - target) / d;
        x -= dx;
        if dx.abs() < 1e-14 * x {
            break;
        }
    }
    x
}

/// `sup_{r > 0} |J_nu(r) r^alpha|` for `-nu < alpha < 1/2`.
pub fn weighted_sup(nu: f64, alpha: f64) -> Result<ValueWithError> {
    weighted_sup_on(nu, alpha, None)
}

/// As [`weighted_sup`], optionally restricted to `(0, upper]`.
pub fn weighted_sup_on(nu: f64, alpha: f64, upper: Option<f64>) -> Result<ValueWithError> {
    let (log_best, rel) = weighted_sup_log(nu, alpha, upper)?;
    let best = log_best.exp();
    Ok(ValueWithError::new(best, rel * best, Method::GridSearch))
}

/// `ln sup |J_nu(r) r^alpha|` over `(0, upper]` together with a relative
/// error bound. Stays finite where the supremum itself underflows.
pub fn weighted_sup_log(nu: f64, alpha: f64, upper: Option<f64>) -> Result<(f64, f64)> {
    let q = NormQuery {
        nu,
        p: f64::INFINITY,
        alpha,
        tol: 1e-8,
    };
    if let Some(u) = upper {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::domain(format!(
                "upper limit must be positive and finite, got {u}"
            )));
        }
    }
    q.validate_with(upper.is_none())?;
    let log_f = |r: f64| ln_abs_j(nu, r, J_TOL) + alpha * r.ln();
    let u = upper.unwrap_or(f64::INFINITY);
    let c = nu.cbrt();
    let eps = 1e-3;
    let step = (c / 20.0).clamp(0.005, 0.1);
    let mut lo = (nu - 5.0 * c).max(eps).min(u);
    let hi = (8.0 * nu + 20.0).min(u);

    // log of r^{nu+alpha} / (2^nu Gamma(nu+1)), increasing in r
    let head_log = |r: f64| (nu + alpha) * r.ln() - nu * std::f64::consts::LN_2 - lgamma(nu + 1.0);

    let mut grid_best = grid_search(&log_f, lo, hi, step);
    if lo > eps && head_log(lo) > grid_best.1 {
        let below = grid_search(&log_f, eps, lo, step);
        if below.1 > grid_best.1 {
            grid_best = below;
        }
        lo = eps;
    }
    let (_, log_best) = grid_best;

    // excess of the analytic bounds over the best value, relative to it
    let mut excess: f64 = 0.0;
    if lo > 0.0 {
        excess = excess.max((head_log(lo) - log_best).exp() - 1.0);
    }
    if u > hi {
        let log_bound = if nu >= 0.5 {
            // r M(r)^2 is decreasing, so |J_nu(r)| r^alpha <= M(hi) hi^alpha
            let c = modulus_sq_coeffs(nu, 6);
            let y = 1.0 / (hi * hi);
            let mut acc = 0.0;
            let mut pw = 1.0;
            for ck in &c {
                acc += ck * pw;
                pw *= y;
            }
            let margin = (c[5] * pw / y).abs() * 2.0;
            0.5 * ((2.0 / (PI * hi)) * (acc + margin)).ln() + alpha * hi.ln()
        } else {
            0.5 * (2.0 / PI).ln() + (alpha - 0.5) * hi.ln()
        };
        excess = excess.max((log_bound - log_best).exp() - 1.0);
    }
    Ok((log_best, 1e-10 + excess.max(0.0)))
}

/// Location and log-value of the maximum of `log_f` on `[a, b]`, by a grid
/// of spacing at most `step` and golden-section refinement of the best
/// few cells.
fn grid_search<F: Fn(f64) -> f64>(log_f: &F, a: f64, b: f64, step: f64) -> (f64, f64) {
    if !(b > a) {
        return (b, log_f(b));
    }
    let n = ((b - a) / step).ceil().max(2.0) as usize;
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| log_f(x)).collect();
    let mut idx: Vec<usize> = (0..=n).collect();
    idx.sort_by(|&i, &j| vs[j].total_cmp(&vs[i]).then(i.cmp(&j)));
    let mut best = (xs[idx[0]], vs[idx[0]]);
    for &i in idx.iter().take(5) {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(n)];
        let cand = golden_max(log_f, lo, hi);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a) <= 1e-12 * b.abs().max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
