#![allow(dead_code)]

use sphere_restriction::bessel::{bessel_j_by, BesselQuery};
use sphere_restriction::Method;

pub const CROSS_NU: [f64; 10] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 50.5, 100.0, 200.0];

pub const METHODS: [Method; 6] = [
    Method::PowerSeries,
    Method::IntegralRepresentation,
    Method::Krasikov,
    Method::Hankel,
    Method::Recurrence,
    Method::ClosedForm,
];

/// 20 log-spaced radii from deep inside the series regime to far beyond `2 nu`.
pub fn cross_radii(nu: f64) -> Vec<f64> {
    let (a, b) = (0.05f64.ln(), (10.0 * nu + 50.0).ln());
    (0..20).map(|i| (a + (b - a) * i as f64 / 19.0).exp()).collect()
}

/// Every disagreement between two applicable methods at `(nu, r)`, and the
/// number of pairs compared.
pub fn cross_check(nu: f64, r: f64) -> (usize, Vec<String>) {
    let q = BesselQuery::new(nu, r).unwrap();
    let vals: Vec<_> = METHODS.iter().filter_map(|&m| bessel_j_by(q, m).ok()).collect();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            pairs += 1;
            if !vals[i].agrees_with(&vals[j]) {
                bad.push(format!("nu={nu} r={r}: {:?} vs {:?}", vals[i], vals[j]));
            }
        }
    }
    (pairs, bad)
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}
