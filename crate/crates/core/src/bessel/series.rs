//! Ascending power series
//! `J_nu(r) = (r/2)^nu / Gamma(nu+1) * sum_k (-r^2/4)^k / (k! (nu+1)_k)`,
//! with the prefactor kept in log scale.

use crate::gamma::lgamma;

pub(crate) struct SeriesEval {
    /// ln of `(r/2)^nu / Gamma(nu+1)`.
    pub ln_prefactor: f64,
    pub sum: f64,
    /// Absolute error of `sum` (truncation plus rounding) before scaling.
    pub sum_error: f64,
    /// Relative error of the prefactor.
    pub prefactor_rel_error: f64,
}

impl SeriesEval {
    pub fn value(&self) -> f64 {
        self.ln_prefactor.exp() * self.sum
    }

    pub fn error(&self) -> f64 {
        self.ln_prefactor.exp() * (self.sum_error + self.sum.abs() * self.prefactor_rel_error)
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_prefactor + self.sum.abs().ln()
    }
}

const MAX_TERMS: usize = 2000;

pub(crate) fn eval(nu: f64, r: f64) -> SeriesEval {
    let ln_prefactor = nu * (0.5 * r).ln() - lgamma(nu + 1.0);
    let x = 0.25 * r * r;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut abs_sum = 1.0f64;
    let mut next = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let ratio = x / (kf * (nu + kf));
        term *= -ratio;
        // terms decrease monotonically once the ratio drops below one
        if ratio < 1.0 && term.abs() <= f64::EPSILON * 0.25 * sum.abs().max(f64::MIN_POSITIVE) {
            next = term.abs();
            break;
        }
        sum += term;
        abs_sum += term.abs();
        next = term.abs();
    }
    let prefactor_rel_error = 2.0 * f64::EPSILON * (nu * (0.5 * r).ln().abs() + lgamma(nu + 1.0).abs() + 1.0);
    SeriesEval {
        ln_prefactor,
        sum,
        sum_error: next + 4.0 * f64::EPSILON * abs_sum,
        prefactor_rel_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent partial-sum oracle using plain factorials.
    fn naive_partial(nu: u32, r: f64, n_terms: u32) -> f64 {
        let mut s = 0.0;
        let mut fact_n = 1.0f64;
        for n in 0..n_terms {
            if n > 0 {
                fact_n *= n as f64;
            }
            let mut fact_nnu = 1.0f64;
            for j in 1..=(n + nu) {
                fact_nnu *= j as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            s += sign / (fact_n * fact_nnu) * (r / 2.0).powi((2 * n + nu) as i32);
        }
        s
    }

    #[test]
    fn matches_partial_sum_oracle() {
        let oracle = naive_partial(2, 1.0, 15);
        // frozen value, also checked against a 30-digit evaluation
        assert!((oracle - 0.114_903_484_931_900_48).abs() < 1e-15);
        let s = eval(2.0, 1.0);
        assert!((s.value() - oracle).abs() < 1e-15);
        assert!(s.error() < 1e-15);
    }

    #[test]
    fn log_form_survives_underflow() {
        let s = eval(300.0, 1.0);
        assert_eq!(s.value(), 0.0);
        assert!(s.ln_abs() < -1500.0);
    }
}
