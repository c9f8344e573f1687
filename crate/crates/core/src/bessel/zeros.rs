//! Zero location: approximate zeros by inversion of the Krasikov phase, and
//! refinement to actual sign changes of `J_nu` for quadrature breakpoints.

use std::f64::consts::PI;

use super::eval_best;
use super::krasikov::{phase_derivative, phase_fn};
use crate::error::{Error, Result};

/// Points in `[r_min, r_max]` where `B(r) - omega` crosses `(k + 1/2) pi`,
/// in increasing order.
pub fn approx_zeros(nu: f64, r_min: f64, r_max: f64) -> Result<Vec<f64>> {
    if !(nu >= 0.5) || !nu.is_finite() {
        return Err(Error::domain(format!("approx_zeros needs nu >= 1/2, got {nu}")));
    }
    if !(r_min >= 2.0 * nu) || !r_max.is_finite() {
        return Err(Error::domain(format!(
            "approx_zeros needs 2 nu <= r_min, got nu = {nu}, r_min = {r_min}"
        )));
    }
    if r_max <= r_min {
        return Ok(Vec::new());
    }
    let mu = nu * nu - 0.25;
    let omega = (2.0 * nu + 1.0) * PI / 4.0;
    let b_lo = phase_fn(mu, r_min);
    let b_hi = phase_fn(mu, r_max);
    let k_first = ((b_lo - omega) / PI - 0.5).ceil() as i64;
    let k_last = ((b_hi - omega) / PI - 0.5).floor() as i64;
    let mut out = Vec::new();
    let mut lo = r_min;
    for k in k_first..=k_last {
        let level = omega + (k as f64 + 0.5) * PI;
        let r = invert_phase(mu, level, lo, r_max);
        out.push(r);
        lo = r;
    }
    Ok(out)
}

/// Solve `B(r) = level` on `[lo, hi]` by Newton's method, bisecting after
/// three steps that fail to halve the residual.
fn invert_phase(mu: f64, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |r: f64| phase_fn(mu, r) - level;
    let mut x = (lo + (level - phase_fn(mu, lo)) / phase_derivative(mu, lo).max(0.1)).clamp(lo, hi);
    let mut prev = f64::INFINITY;
    let mut stalls = 0;
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if fx.abs() <= 4.0 * f64::EPSILON * level.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            return x;
        }
        stalls = if fx.abs() > 0.5 * prev { stalls + 1 } else { 0 };
        prev = fx.abs();
        let newton = x - fx / phase_derivative(mu, x);
        x = if stalls >= 3 || !(newton > lo && newton < hi) {
            stalls = 0;
            0.5 * (lo + hi)
        } else {
            newton
        };
    }
    x
}

fn j(nu: f64, r: f64) -> f64 {
    eval_best(nu, r, 1e-14).value
}

/// Illinois iteration on a sign-change bracket.
fn refine(nu: f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        if (b - a).abs() <= 1e-14 * b.abs() {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let fc = j(nu, c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (a + b)
}

fn scan(nu: f64, a: f64, b: f64, step: f64, out: &mut Vec<f64>) {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut x0 = a;
    let mut f0 = j(nu, x0);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + h * i as f64 };
        let f1 = j(nu, x1);
        if f0 == 0.0 && i > 1 {
            out.push(x0);
        } else if f0 * f1 < 0.0 {
            out.push(refine(nu, x0, x1, f0, f1));
        }
        x0 = x1;
        f0 = f1;
    }
}

/// Zeros of `J_nu` in `(lo, hi)`, refined to sign changes of the computed
/// values. Consecutive zeros are at least about `3` apart, which the scan
/// steps rely on.
pub(crate) fn zeros_between(nu: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    // the first positive zero exceeds nu
    let start = lo.max(nu);
    if !(start < hi) {
        return out;
    }
    let split = if nu >= 0.5 { (2.0 * nu).max(8.0).max(start) } else { hi };
    if start < split.min(hi) {
        scan(nu, start, split.min(hi), 1.0, &mut out);
    }
    if split < hi {
        let preds = approx_zeros(nu, split, hi).unwrap_or_default();
        let mut edges = Vec::with_capacity(preds.len() + 1);
        edges.push(split);
        for w in preds.windows(2) {
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(hi);
        let vals: Vec<f64> = edges.iter().map(|&x| j(nu, x)).collect();
        for i in 0..edges.len() - 1 {
            let (a, b) = (edges[i], edges[i + 1]);
            let (fa, fb) = (vals[i], vals[i + 1]);
            if fa * fb < 0.0 {
                out.push(refine(nu, a, b, fa, fb));
            } else {
                scan(nu, a, b, 0.5, &mut out);
            }
        }
    }
    out.retain(|&z| z > lo && z < hi);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * b.abs());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        let z = approx_zeros(0.5, 4.0, 30.0).unwrap();
        let expect: Vec<f64> = (2..=9).map(|k| k as f64 * PI).collect();
        assert_eq!(z.len(), expect.len());
        for (a, b) in z.iter().zip(&expect) {
            assert!((a - b).abs() < 0.05);
        }
    }

    #[test]
    fn gaps_approach_pi() {
        let z = approx_zeros(10.0, 20.0, 60.0).unwrap();
        let gaps: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.len() >= 10);
        for w in gaps.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(gaps.iter().all(|&g| g > PI));
        let (first, last) = (gaps[0] - PI, gaps.last().unwrap() - PI);
        assert!(last < 0.5 * first && last < 0.06, "{first} {last}");
    }

    #[test]
    fn empty_range() {
        assert!(approx_zeros(3.0, 10.0, 10.0).unwrap().is_empty());
        assert!(approx_zeros(3.0, 5.0, 10.0).is_err());
    }

    #[test]
    fn refined_zeros_of_j0() {
        let z = zeros_between(0.0, 0.0, 10.0);
        let known = [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_012];
        assert_eq!(z.len(), 3);
        for (a, b) in z.iter().zip(known) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn refined_zeros_large_order_alternate() {
        let nu = 20.0;
        let z = zeros_between(nu, 0.0, 200.0);
        assert!(z.len() > 40);
        for w in z.windows(2) {
            let mid = j(nu, 0.5 * (w[0] + w[1]));
            assert!(mid != 0.0);
            assert!(w[1] - w[0] > 3.0);
        }
        for &x in &z {
            assert!(j(nu, x).abs() < 1e-13);
        }
    }
}
