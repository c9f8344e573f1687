//! Parameter grids and the range grammar used on the command line.
//!
//! A list is a comma-separated sequence of items, each of which is a number
//! (`4/3`, `inf` accepted), a geometric range `start:stop:xF` or an
//! arithmetic range `start:stop:+K`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::format::vec_num;
use super::BoundId;
use crate::error::{Error, Result};

pub const NU_MAX: f64 = 400.0;
pub const P_MAX: f64 = 16.0;
pub const D_MAX: u32 = 400;
/// Bounds that are closed-form in `d` accept much larger dimensions.
pub const D_MAX_CLOSED_FORM: u32 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(with = "vec_num")]
    pub nu: Vec<f64>,
    #[serde(with = "vec_num")]
    pub p: Vec<f64>,
    #[serde(with = "vec_num")]
    pub q: Vec<f64>,
    pub d: Vec<u32>,
    /// Weight exponents per admissible interval.
    pub alpha_count: usize,
    /// Offset of the extreme weight exponents from the interval ends.
    pub alpha_offset: f64,
    /// Sample points in `r` per order.
    pub r_count: usize,
}

impl GridSpec {
    fn empty() -> Self {
        Self {
            nu: vec![],
            p: vec![],
            q: vec![],
            d: vec![],
            alpha_count: 0,
            alpha_offset: 0.0,
            r_count: 0,
        }
    }

    /// The default grid of a bound.
    pub fn default_for(id: BoundId) -> Self {
        let pow2 = |a: u32, b: u32| -> Vec<f64> { (a..=b).map(|k| 2f64.powi(k as i32)).collect() };
        let stempak_p = vec![1.0, 2.0, 3.0, 3.9, 4.0, 4.1, 6.0, 10.0];
        let mut g = Self::empty();
        match id {
            BoundId::StempakUpper | BoundId::StempakLower => {
                g.nu = pow2(1, 8);
                g.p = stempak_p;
                g.alpha_count = 5;
                g.alpha_offset = 1e-2;
            }
            BoundId::StempakInf | BoundId::StempakLowerInf => {
                g.nu = pow2(1, 8);
                g.alpha_count = 5;
                g.alpha_offset = 1e-2;
            }
            BoundId::Bessel2 => {
                g.nu = vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 200.0];
                g.r_count = 120;
            }
            BoundId::Bessel3 => {
                g.nu = vec![0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 200.0];
                g.r_count = 120;
            }
            BoundId::Bessel4 => {
                g.nu = pow2(1, 8);
                g.r_count = 60;
            }
            BoundId::Bessel1 => {
                g.nu = pow2(0, 8);
                g.r_count = 200;
            }
            BoundId::KrasikovError => {
                g.nu = vec![1.0, 2.0, 5.0, 20.0, 100.0];
                g.r_count = 50;
            }
            BoundId::SigmaHatBd => {
                g.d = vec![4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 400];
            }
            BoundId::EllDLimit => {
                g.d = (1..=40).map(|k| 10 * k).collect();
            }
            BoundId::HlsLimit => {
                g.d = (1..=100).map(|k| 10 * k).collect();
            }
            BoundId::CompositeCdLimit => {
                g.d = (2..=13).map(|k| 1u32 << k).chain([10_000]).collect();
            }
            BoundId::RadialBand => {
                g.d = vec![4, 8, 16, 32, 64, 128, 200];
            }
            BoundId::RadialTrendConv => {
                g.p = vec![1.25, 4.0 / 3.0, 1.5];
                g.d = (1..=15).map(|k| 10 * k).collect();
            }
            BoundId::RadialTrendDiv => {
                g.p = vec![4.0 / 3.0];
                g.q = vec![8.0];
                g.d = (1..=20).map(|k| 10 * k).collect();
            }
            BoundId::GeneralUpperTrend => {
                g.p = vec![4.0 / 3.0];
                g.q = vec![2.0];
                g.d = (4..=40).map(|k| 10 * k).collect();
            }
        }
        g
    }

    /// Check the supported ranges for `id`.
    pub fn validate(&self, id: BoundId) -> Result<()> {
        for &nu in &self.nu {
            if !(0.0..=NU_MAX).contains(&nu) {
                return Err(Error::parameter(format!("nu = {nu} outside [0, {NU_MAX}]")));
            }
        }
        for &p in &self.p {
            if !((1.0..=P_MAX).contains(&p) || p == f64::INFINITY) {
                return Err(Error::parameter(format!("p = {p} outside [1, {P_MAX}] and not inf")));
            }
        }
        for &q in &self.q {
            if !(q >= 1.0) {
                return Err(Error::parameter(format!("q = {q} must be at least 1")));
            }
        }
        let d_max = if id.closed_form_in_d() {
            D_MAX_CLOSED_FORM
        } else {
            D_MAX
        };
        for &d in &self.d {
            if d < 2 || d > d_max {
                return Err(Error::parameter(format!("d = {d} outside [2, {d_max}]")));
            }
        }
        if !(self.alpha_offset >= 0.0 && self.alpha_offset < 0.5) {
            return Err(Error::parameter(format!(
                "alpha offset {} outside [0, 0.5)",
                self.alpha_offset
            )));
        }
        if self.alpha_count > 1000 || self.r_count > 100_000 {
            return Err(Error::parameter("grid too large"));
        }
        if !self.q.is_empty() && self.q.len() != self.p.len() {
            return Err(Error::parameter(format!(
                "q list ({}) must pair with the p list ({})",
                self.q.len(),
                self.p.len()
            )));
        }
        Ok(())
    }

    /// Roughly double the sampling density: midpoints are inserted in the
    /// order and dimension lists (geometric means for orders) and the
    /// per-interval counts doubled.
    pub fn densify(&self) -> Self {
        let mut g = self.clone();
        g.nu = refine_list(&self.nu, |a, b| if a > 0.0 { (a * b).sqrt() } else { 0.5 * b });
        let mut d: Vec<u32> = Vec::new();
        for w in self.d.windows(2) {
            d.push(w[0]);
            let mid = (w[0] + w[1]) / 2;
            if mid > w[0] && mid < w[1] {
                d.push(mid);
            }
        }
        d.extend(self.d.last());
        g.d = d;
        if self.alpha_count > 1 {
            g.alpha_count = 2 * self.alpha_count - 1;
        }
        g.r_count = 2 * self.r_count;
        g
    }

    /// SHA-256 of the canonical JSON of `(id, grid, tol)`, hex encoded.
    pub fn hash(&self, id: BoundId, tol: f64) -> String {
        let payload = serde_json::json!({
            "bound_id": id,
            "grid": self,
            "tol": super::format::round_sig(tol),
        });
        hex::encode(Sha256::digest(payload.to_string().as_bytes()))
    }
}

fn refine_list(xs: &[f64], mid: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * xs.len());
    for w in xs.windows(2) {
        out.push(w[0]);
        out.push(mid(w[0], w[1]));
    }
    out.extend(xs.last());
    out
}

fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::parameter(format!("cannot parse number '{t}'"));
    match t {
        "inf" | "infinity" | "Inf" | "INF" => return Ok(f64::INFINITY),
        _ => {}
    }
    if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0.0 {
            return Err(bad());
        }
        return Ok(a / b);
    }
    t.parse().map_err(|_| bad())
}

/// Parse a list in the grid grammar.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_number(x)?),
            [a, b, step] => {
                let start = parse_number(a)?;
                let stop = parse_number(b)?;
                if !(start.is_finite() && stop.is_finite()) || stop < start {
                    return Err(Error::parameter(format!("range '{item}' needs finite start <= stop")));
                }
                let slack = 1e-9 * stop.abs().max(1.0);
                if let Some(f) = step.strip_prefix('x') {
                    let f = parse_number(f)?;
                    if !(f > 1.0) || !(start > 0.0) {
                        return Err(Error::parameter(format!(
                            "geometric range '{item}' needs start > 0 and factor > 1"
                        )));
                    }
                    let mut k = 0;
                    loop {
                        let x = start * f.powi(k);
                        if x > stop + slack {
                            break;
                        }
                        out.push(x);
                        k += 1;
                    }
                } else if let Some(h) = step.strip_prefix('+') {
                    let h = parse_number(h)?;
                    if !(h > 0.0) {
                        return Err(Error::parameter(format!(
                            "arithmetic range '{item}' needs a positive step"
                        )));
                    }
                    let mut k = 0u64;
                    loop {
                        let x = start + h * k as f64;
                        if x > stop + slack {
                            break;
                        }
                        out.push(x);
                        k += 1;
                    }
                } else {
                    return Err(Error::parameter(format!(
                        "range step '{step}' must be 'xF' (geometric) or '+K' (arithmetic)"
                    )));
                }
            }
            _ => return Err(Error::parameter(format!("cannot parse grid item '{item}'"))),
        }
        if out.len() > 1_000_000 {
            return Err(Error::parameter("grid list too long"));
        }
    }
    if out.is_empty() {
        return Err(Error::parameter(format!("empty grid list '{s}'")));
    }
    Ok(out)
}

/// Parse a list of dimensions; every entry must be a whole number.
pub fn parse_dims(s: &str) -> Result<Vec<u32>> {
    parse_list(s)?
        .into_iter()
        .map(|x| {
            let r = x.round();
            if (x - r).abs() > 1e-9 || !(r >= 0.0) || r > u32::MAX as f64 {
                Err(Error::parameter(format!("dimension {x} is not a whole number")))
            } else {
                Ok(r as u32)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(
            parse_list("2:256:x2").unwrap(),
            vec![2., 4., 8., 16., 32., 64., 128., 256.]
        );
        assert_eq!(parse_list("10:40:+10").unwrap(), vec![10., 20., 30., 40.]);
        assert_eq!(parse_list("1, 2,4,6").unwrap(), vec![1., 2., 4., 6.]);
        let v = parse_list("4/3,inf").unwrap();
        assert!((v[0] - 4.0 / 3.0).abs() < 1e-15 && v[1].is_infinite());
        assert_eq!(parse_list("0:1:+0.25").unwrap().len(), 5);
        assert!(parse_list("1:2:3").is_err());
        assert!(parse_list("5:1:+1").is_err());
        assert!(parse_list("").is_err());
        assert!(parse_list("0:8:x2").is_err());
        assert_eq!(parse_dims("10:400:+10").unwrap().len(), 40);
        assert!(parse_dims("2.5").is_err());
    }

    #[test]
    fn densify_doubles() {
        let g = GridSpec::default_for(BoundId::StempakUpper);
        let h = g.densify();
        assert_eq!(h.nu.len(), 2 * g.nu.len() - 1);
        assert_eq!(h.alpha_count, 9);
        assert!((h.nu[1] - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let g = GridSpec::default_for(BoundId::KrasikovError);
        let a = g.hash(BoundId::KrasikovError, 1e-8);
        assert_eq!(a, g.hash(BoundId::KrasikovError, 1e-8));
        assert_ne!(a, g.hash(BoundId::KrasikovError, 1e-9));
        assert_ne!(a, g.hash(BoundId::Bessel3, 1e-8));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn defaults_validate() {
        for id in BoundId::ALL {
            GridSpec::default_for(id).validate(id).unwrap();
        }
        let mut g = GridSpec::default_for(BoundId::Bessel3);
        g.nu.push(500.0);
        assert!(g.validate(BoundId::Bessel3).is_err());
    }
}
