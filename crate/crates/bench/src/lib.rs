//! Fixed workloads shared by the benchmarks.

/// `(nu, r)` pairs covering the series, transition and oscillatory regimes.
pub fn bessel_points() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for nu in [0.0, 0.5, 2.0, 10.0, 50.5, 100.0, 200.0] {
        for k in 0..12 {
            let r = 0.5 * 2f64.powf(k as f64 * 0.9);
            out.push((nu, r));
        }
    }
    out
}

/// `(nu, p, alpha)` triples for weighted-norm benchmarks.
pub fn norm_queries() -> Vec<(f64, f64, f64)> {
    vec![
        (0.5, 2.0, -0.25),
        (2.0, 1.0, -1.0),
        (10.0, 3.0, -0.2),
        (50.0, 4.0, -0.3),
    ]
}
