//! Adaptive Gauss–Kronrod (G7/K15) quadrature over a list of panels.
//!
//! Panels are refined globally: the panel with the largest error estimate is
//! bisected until the summed estimate meets the target or the panel budget
//! runs out. The per-panel estimate is the raw `|K15 - G7|` difference, which
//! for smooth integrands is the error of the 7-point rule and therefore far
//! larger than the error of the returned 15-point value.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::sum::CompensatedSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One integrated panel.
#[derive(Clone, Copy, Debug)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    /// Integral of `|f|`, used for the round-off floor.
    pub abs_value: f64,
}

impl Panel {
    fn settled(&self) -> bool {
        self.error <= 8.0 * f64::EPSILON * self.abs_value
            || (self.b - self.a) <= 1e-13 * self.a.abs().max(self.b.abs()).max(1e-300)
    }
}

/// Apply the 15-point Kronrod rule on `[a, b]`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * h;
    let abs_value = abs * h.abs();
    let error = ((kron - gauss) * h).abs() + 8.0 * f64::EPSILON * abs_value;
    Panel {
        a,
        b,
        value,
        error,
        abs_value,
    }
}

#[derive(Clone, Copy, Debug)]
struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by position so refinement order is reproducible.
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Stopping rule: stop once `error <= max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug)]
pub struct Target {
    pub abs: f64,
    pub rel: f64,
}

/// Outcome of an adaptive integration.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    /// Final panels in increasing order of their left endpoint.
    pub panels: Vec<Panel>,
}

impl QuadResult {
    /// Compensated sum of panel values and errors restricted to `[lo, hi]`.
    /// Panels are assumed not to straddle `lo` or `hi`.
    pub fn part(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut v = CompensatedSum::new();
        let mut e = 0.0;
        for p in self.panels.iter().filter(|p| p.a >= lo && p.b <= hi) {
            v.add(p.value);
            e += p.error;
        }
        (v.value(), e)
    }
}

/// Incremental adaptive integrator. Intervals can be added in several batches;
/// each call to [`Integrator::refine`] brings the whole set to the target.
pub struct Integrator<F> {
    f: F,
    active: BinaryHeap<ByError>,
    done: Vec<Panel>,
    max_panels: usize,
    exhausted: bool,
}

impl<F: Fn(f64) -> f64> Integrator<F> {
    pub fn new(f: F, max_panels: usize) -> Self {
        Self {
            f,
            active: BinaryHeap::new(),
            done: Vec::new(),
            max_panels,
            exhausted: false,
        }
    }

    pub fn add_interval(&mut self, a: f64, b: f64) {
        if b > a {
            let p = gk15(&self.f, a, b);
            self.push(p);
        }
    }

    /// Add every consecutive pair of a sorted breakpoint list.
    pub fn add_breakpoints(&mut self, pts: &[f64]) {
        for w in pts.windows(2) {
            self.add_interval(w[0], w[1]);
        }
    }

    fn push(&mut self, p: Panel) {
        if p.settled() {
            self.done.push(p);
        } else {
            self.active.push(ByError(p));
        }
    }

    fn n_panels(&self) -> usize {
        self.active.len() + self.done.len()
    }

    /// Current totals, summed in left-endpoint order.
    pub fn totals(&self) -> (f64, f64) {
        let mut all: Vec<Panel> = self.done.clone();
        all.extend(self.active.iter().map(|p| p.0));
        all.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut v = CompensatedSum::new();
        let mut e = CompensatedSum::new();
        for p in &all {
            v.add(p.value);
            e.add(p.error);
        }
        (v.value(), e.value())
    }

    pub fn refine(&mut self, target: Target) -> (f64, f64) {
        let (mut value, mut error) = self.totals();
        let mut since_resum = 0usize;
        loop {
            let goal = target.abs.max(target.rel * value.abs());
            if error <= goal {
                break;
            }
            if self.n_panels() >= self.max_panels {
                self.exhausted = true;
                break;
            }
            let Some(ByError(worst)) = self.active.pop() else {
                break;
            };
            let mid = 0.5 * (worst.a + worst.b);
            let left = gk15(&self.f, worst.a, mid);
            let right = gk15(&self.f, mid, worst.b);
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            self.push(left);
            self.push(right);
            since_resum += 1;
            if since_resum >= 256 {
                // avoid drift in the running totals
                (value, error) = self.totals();
                since_resum = 0;
            }
        }
        self.totals()
    }

    pub fn finish(self, target: Target) -> QuadResult {
        let (value, error) = self.totals();
        let goal = target.abs.max(target.rel * value.abs());
        let mut panels = self.done;
        panels.extend(self.active.into_iter().map(|p| p.0));
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
        QuadResult {
            value,
            error,
            converged: error <= goal,
            panels,
        }
    }
}

/// One-shot adaptive integration over consecutive breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], target: Target, max_panels: usize) -> QuadResult {
    let mut it = Integrator::new(f, max_panels);
    it.add_breakpoints(breakpoints);
    it.refine(target);
    it.finish(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x| x.powi(5) - 3.0 * x * x + 1.0,
            &[0.0, 2.0],
            Target { abs: 1e-14, rel: 0.0 },
            100,
        );
        assert!((r.value - (64.0 / 6.0 - 8.0 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_with_breakpoints() {
        let pts: Vec<f64> = (0..=20).map(|k| k as f64 * PI).collect();
        let r = integrate(|x| x.sin().abs(), &pts, Target { abs: 1e-12, rel: 0.0 }, 1000);
        assert!(r.converged);
        assert!((r.value - 40.0).abs() < 1e-12);
        assert!(r.error < 1e-12);
    }

    #[test]
    fn endpoint_singularity_refines() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate(
            |x| if x > 0.0 { x.powf(-0.5) } else { 0.0 },
            &[0.0, 1.0],
            Target { abs: 1e-9, rel: 0.0 },
            2000,
        );
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn budget_exhaustion_flags_unconverged() {
        let r = integrate(|x| (1.0 / x).sin(), &[1e-6, 1.0], Target { abs: 1e-15, rel: 0.0 }, 8);
        assert!(!r.converged);
        assert!(r.panels.len() <= 9);
    }

    #[test]
    fn part_sums_subranges() {
        let r = integrate(|x| x, &[0.0, 1.0, 2.0], Target { abs: 1e-14, rel: 0.0 }, 10);
        let (lo, _) = r.part(0.0, 1.0);
        let (hi, _) = r.part(1.0, 2.0);
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 1.5).abs() < 1e-15);
    }
}
