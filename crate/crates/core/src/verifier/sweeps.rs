//! Sampling, evaluation and judgement of each bound.

use std::f64::consts::{LN_2, PI};

use super::{
    envelope::stempak_envelope, par_map, BoundId, BoundSweepReport, CheckKind, GridSpec, GroupConstant, Point, Record,
    Reference, Status, SweepContext, FROZEN_SLACK,
};
use crate::bessel::{
    eval_best, global_half_power_log, krasikov_parts, series_bound_log, tail_bound_log, transition_bound_log,
};
use crate::error::{Error, Result};
use crate::gamma::lgamma;
use crate::restriction::{
    conjugate, general_upper_bound_log, hls_normalized, log_ell_d, propagator_constant, radial_constant,
};
use crate::value::Method;
use crate::weighted::weighted_sup_log;

/// Accuracy requested from Bessel evaluations in the pointwise sweeps.
const J_TOL: f64 = 1e-14;
/// Relative error above which a calibrated point is not trusted.
const MAX_REL_ERROR: f64 = 1e-6;

pub(super) fn run(id: BoundId, grid: &GridSpec, tol: f64, ctx: &SweepContext) -> Result<BoundSweepReport> {
    let points = points(id, grid)?;
    // constants needed by every point are fixed before the parallel part
    let constant = match id {
        BoundId::CompositeCdLimit => Some(ctx.c_bullet_or_measure(tol)?),
        BoundId::GeneralUpperTrend => Some(ctx.stein_tomas_or_measure(tol)?),
        _ => None,
    };
    let records = par_map(&points, |pt| evaluate(id, pt, tol, ctx, constant));
    Ok(judge(id, grid, tol, ctx, records))
}

fn linspace_open(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(a * b).sqrt()];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `count` weight exponents inside `(lo, hi)`, `offset` away from the ends.
fn alphas(lo: f64, hi: f64, count: usize, offset: f64) -> Vec<f64> {
    let a = lo + offset;
    let b = hi - offset;
    match count {
        0 => vec![],
        1 => vec![0.5 * (a + b)],
        n => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}

fn points(id: BoundId, g: &GridSpec) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    let nu_pt = |nu: f64, r: f64| Point {
        nu: Some(nu),
        r: Some(r),
        ..Point::default()
    };
    match id {
        BoundId::StempakUpper | BoundId::StempakLower => {
            for &p in &g.p {
                require(p.is_finite(), || {
                    format!("{id} needs finite p; use stempak-inf for p = inf")
                })?;
            }
            for &nu in &g.nu {
                require(nu >= 2.0, || format!("{id} needs nu >= 2, got {nu}"))?;
                for &p in &g.p {
                    for a in alphas(-nu - 1.0 / p, 0.5 - 1.0 / p, g.alpha_count, g.alpha_offset) {
                        out.push(Point {
                            nu: Some(nu),
                            p: Some(p),
                            alpha: Some(a),
                            ..Point::default()
                        });
                    }
                }
            }
        }
        BoundId::StempakInf | BoundId::StempakLowerInf => {
            for &nu in &g.nu {
                require(nu >= 2.0, || format!("{id} needs nu >= 2, got {nu}"))?;
                for a in alphas(-nu, 0.5, g.alpha_count, g.alpha_offset) {
                    out.push(Point {
                        nu: Some(nu),
                        p: Some(f64::INFINITY),
                        alpha: Some(a),
                        ..Point::default()
                    });
                }
            }
        }
        BoundId::Bessel2 => {
            for &nu in &g.nu {
                // stay where the envelope is representable
                let r_lo = if nu > 0.0 {
                    ((-600.0 + nu * LN_2 + lgamma(nu + 1.0)) / nu).exp().max(1e-3)
                } else {
                    1e-3
                };
                for r in logspace(r_lo, 4.0 * nu + 40.0, g.r_count) {
                    out.push(nu_pt(nu, r));
                }
            }
        }
        BoundId::Bessel3 => {
            for &nu in &g.nu {
                require(nu >= 0.5, || format!("{id} needs nu >= 1/2, got {nu}"))?;
                let span = 38.0 * nu + 100.0;
                for t in linspace_open(0.0, 1.0, g.r_count) {
                    out.push(nu_pt(nu, 2.0 * nu + span * t * t));
                }
            }
        }
        BoundId::Bessel4 => {
            for &nu in &g.nu {
                require(nu >= 2.0, || format!("{id} needs nu >= 2, got {nu}"))?;
                for r in linspace_open(nu / 2.0, 2.0 * nu, g.r_count) {
                    out.push(nu_pt(nu, r));
                }
            }
        }
        BoundId::Bessel1 => {
            for &nu in &g.nu {
                require(nu >= 1.0, || format!("{id} needs nu >= 1, got {nu}"))?;
                let half = g.r_count / 2;
                let mut rs = logspace(0.01, 40.0 * nu + 100.0, g.r_count - half);
                // resolve the first maximum near the turning point
                rs.extend(linspace_open(nu, nu + 4.0 * nu.cbrt() + 6.0, half));
                rs.sort_by(f64::total_cmp);
                for r in rs {
                    out.push(nu_pt(nu, r));
                }
            }
        }
        BoundId::KrasikovError => {
            for &nu in &g.nu {
                require(nu > 0.5, || format!("{id} needs nu > 1/2, got {nu}"))?;
                let n = g.r_count;
                for i in 0..n {
                    out.push(nu_pt(nu, 2.0 * nu + 38.0 * nu * (i + 1) as f64 / n as f64));
                }
            }
        }
        BoundId::SigmaHatBd | BoundId::EllDLimit | BoundId::RadialBand => {
            for &d in &g.d {
                require(d >= 4, || format!("{id} needs d >= 4, got {d}"))?;
                out.push(Point {
                    d: Some(d),
                    ..Point::default()
                });
            }
        }
        BoundId::HlsLimit | BoundId::CompositeCdLimit => {
            for &d in &g.d {
                out.push(Point {
                    d: Some(d),
                    ..Point::default()
                });
            }
        }
        BoundId::RadialTrendConv | BoundId::RadialTrendDiv | BoundId::GeneralUpperTrend => {
            for (i, &p) in g.p.iter().enumerate() {
                let q = g.q.get(i).copied().unwrap_or_else(|| conjugate(p));
                for &d in &g.d {
                    out.push(Point {
                        p: Some(p),
                        q: Some(q),
                        d: Some(d),
                        ..Point::default()
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Pointwise check of `|J| <= env` with the evaluation error accounted for.
fn explicit_record(pt: Point, value: f64, error: f64, log_env: f64) -> Record {
    let a = value.abs();
    let log_lhs = a.ln();
    let mut rec = Record::from_logs(pt, log_lhs, log_env, error / a);
    let env = log_env.exp();
    rec.status = if !error.is_finite() {
        rec.note = Some("evaluation failed".into());
        Status::Inconclusive
    } else if a + error <= env {
        Status::Pass
    } else if a - error > env {
        Status::Fail
    } else {
        rec.note = Some("undecided within the evaluation error".into());
        Status::Inconclusive
    };
    rec
}

fn calibrated_record(pt: Point, log_lhs: f64, log_rhs: f64, rel: f64) -> Record {
    let mut rec = Record::from_logs(pt, log_lhs, log_rhs, rel);
    if !log_lhs.is_finite() || !(rel <= MAX_REL_ERROR) {
        rec.status = Status::Inconclusive;
        rec.note = Some(format!("left-hand side not resolved (relative error {rel:.1e})"));
    }
    rec
}

fn bessel(nu: f64, r: f64) -> (f64, f64, Method) {
    let v = eval_best(nu, r, J_TOL);
    (v.value, v.error, v.method)
}

fn evaluate(id: BoundId, pt: &Point, tol: f64, ctx: &SweepContext, constant: Option<f64>) -> Record {
    match evaluate_inner(id, pt, tol, ctx, constant) {
        Ok(r) => r,
        Err(e) => Record::inconclusive(pt.clone(), e.to_string()),
    }
}

fn evaluate_inner(id: BoundId, pt: &Point, tol: f64, ctx: &SweepContext, constant: Option<f64>) -> Result<Record> {
    let nu = pt.nu.unwrap_or(0.0);
    let r = pt.r.unwrap_or(0.0);
    let p = pt.p.unwrap_or(0.0);
    let alpha = pt.alpha.unwrap_or(0.0);
    let d = pt.d.unwrap_or(0);
    let pt = pt.clone();
    Ok(match id {
        BoundId::StempakUpper | BoundId::StempakLower => {
            let env = stempak_envelope(nu, p, alpha)?;
            let (log_n, rel, converged) = ctx.norm(nu, p, alpha, tol)?;
            let rhs = if id == BoundId::StempakUpper {
                env.upper_log
            } else {
                env.lower_log
            };
            let mut rec = calibrated_record(pt, log_n, rhs, rel);
            if !converged {
                rec.status = Status::Inconclusive;
                rec.note = Some("norm did not converge".into());
            }
            rec
        }
        BoundId::StempakInf | BoundId::StempakLowerInf => {
            let env = stempak_envelope(nu, f64::INFINITY, alpha)?;
            let (log_s, rel) = weighted_sup_log(nu, alpha, None)?;
            let rhs = if id == BoundId::StempakInf {
                env.upper_log
            } else {
                env.lower_log
            };
            calibrated_record(pt, log_s, rhs, rel)
        }
        BoundId::Bessel2 => {
            let (v, e, _) = bessel(nu, r);
            explicit_record(pt, v, e, series_bound_log(nu, r))
        }
        BoundId::Bessel3 => {
            let (v, e, _) = bessel(nu, r);
            explicit_record(pt, v, e, tail_bound_log(r))
        }
        BoundId::Bessel4 => {
            let (v, e, _) = bessel(nu, r);
            let env = transition_bound_log(nu, r);
            calibrated_record(pt, v.abs().ln(), env, e / v.abs())
        }
        BoundId::Bessel1 => {
            let (v, e, _) = bessel(nu, r);
            let env = global_half_power_log(nu, r);
            let mut rec = calibrated_record(pt, v.abs().ln(), env, e / v.abs());
            // near zeros the relative error is meaningless but the ratio is small
            if rec.status == Status::Inconclusive && e.is_finite() && (v.abs() + e).ln() < env - 2.0 {
                rec.status = Status::Pass;
                rec.note = None;
            }
            rec
        }
        BoundId::KrasikovError => {
            let k = krasikov_parts(nu, r)?;
            let (v, e, m) = bessel(nu, r);
            if m == Method::Krasikov {
                return Ok(Record::inconclusive(
                    pt,
                    "reference value came from the approximation itself",
                ));
            }
            explicit_record(pt, v - k.leading, e, k.g_bound.ln())
        }
        BoundId::SigmaHatBd => {
            // |hat sigma(rho)| rho^{(d-1)/2} / nu^{1/6} = sqrt(2 pi) |J_nu(s)| s^{1/2} / nu^{1/6}, s = 2 pi rho
            let nu = d as f64 / 2.0 - 1.0;
            let (log_s, rel) = weighted_sup_log(nu, 0.5, Some(8.0 * nu + 40.0))?;
            calibrated_record(pt, 0.5 * (2.0 * PI).ln() + log_s, nu.ln() / 6.0, rel)
        }
        BoundId::EllDLimit => {
            let l = log_ell_d(d)?;
            calibrated_record(pt, l, 0.5 * (2.0 / std::f64::consts::E).ln(), 1e-14)
        }
        BoundId::HlsLimit => {
            let h = hls_normalized(d)?;
            calibrated_record(pt, h.value.ln(), 0.0, h.error / h.value)
        }
        BoundId::CompositeCdLimit => {
            let c = propagator_constant(d, constant.expect("c_bullet resolved before the sweep"))?;
            calibrated_record(pt, c.log_composite, LN_2, 1e-14)
        }
        BoundId::RadialBand => {
            let df = d as f64;
            let ps = 2.0 * (df + 1.0) / (df + 3.0);
            radial_record(pt, d, ps, 2.0, tol, 0.0)?
        }
        BoundId::RadialTrendConv => radial_record(pt.clone(), d, p, pt.q.unwrap_or(conjugate(p)), tol, 0.1f64.ln())?,
        BoundId::RadialTrendDiv => radial_record(pt.clone(), d, p, pt.q.unwrap_or(conjugate(p)), tol, 100f64.ln())?,
        BoundId::GeneralUpperTrend => {
            let q = pt.q.unwrap_or(2.0);
            let l = general_upper_bound_log(
                d,
                p,
                q,
                constant.expect("Stein-Tomas constant resolved before the sweep"),
            )?;
            calibrated_record(pt, l, 0.01f64.ln(), 1e-12)
        }
    })
}

fn radial_record(pt: Point, d: u32, p: f64, q: f64, tol: f64, log_rhs: f64) -> Result<Record> {
    let r = radial_constant(d, p, q, tol)?;
    if r.is_infinite() {
        return Ok(Record::inconclusive(pt, "radial constant is infinite"));
    }
    let rel = match r.value {
        crate::restriction::RadialValue::Finite { rel_error, .. } => rel_error,
        _ => f64::INFINITY,
    };
    Ok(calibrated_record(pt, r.log_value(), log_rhs, rel))
}

fn group_label(id: BoundId, pt: &Point) -> Option<String> {
    use super::format::machine;
    match id {
        BoundId::StempakUpper | BoundId::StempakLower => pt.p.map(|p| format!("p={}", machine(p))),
        BoundId::RadialTrendConv | BoundId::RadialTrendDiv | BoundId::GeneralUpperTrend => {
            Some(format!("p={},q={}", machine(pt.p?), machine(pt.q?)))
        }
        _ => None,
    }
}

fn extremes<'a>(recs: impl Iterator<Item = &'a Record>) -> Option<(f64, f64)> {
    let mut out: Option<(f64, f64)> = None;
    for r in recs.filter(|r| r.status != Status::Inconclusive && r.ratio.is_finite()) {
        out = Some(match out {
            None => (r.ratio, r.ratio),
            Some((lo, hi)) => (lo.min(r.ratio), hi.max(r.ratio)),
        });
    }
    out
}

fn judge(id: BoundId, grid: &GridSpec, tol: f64, ctx: &SweepContext, mut records: Vec<Record>) -> BoundSweepReport {
    let kind = id.check_kind();
    let frozen = ctx.calibration.as_ref().and_then(|c| c.entry(id).cloned());
    let mut failures: Vec<String> = Vec::new();

    // groups in order of first appearance
    let mut labels: Vec<String> = Vec::new();
    for r in &records {
        if let Some(l) = group_label(id, &r.point) {
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
    }
    let groups: Vec<GroupConstant> = labels
        .iter()
        .filter_map(|l| {
            let (lo, hi) = extremes(
                records
                    .iter()
                    .filter(|r| group_label(id, &r.point).as_deref() == Some(l)),
            )?;
            Some(GroupConstant {
                label: l.clone(),
                c_min: lo,
                c_max: hi,
            })
        })
        .collect();
    let (c_min, c_max) = match extremes(records.iter()) {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };

    let mut derived_constant = None;
    let reference = match kind {
        CheckKind::ExplicitUpper => {
            for r in records.iter().filter(|r| r.status == Status::Fail) {
                failures.push(format!("{:?}: ratio {} exceeds 1", r.point, r.ratio));
            }
            Reference {
                kind,
                source: "explicit".into(),
                c_min: None,
                c_max: Some(1.0),
            }
        }
        CheckKind::CalibratedUpper => {
            let (ceiling, source) = match frozen.as_ref().and_then(|f| f.c_max) {
                Some(c) => (Some(c), "calibration"),
                None => (c_max, "measured"),
            };
            if let Some(c) = ceiling {
                for r in records.iter_mut().filter(|r| r.status == Status::Pass) {
                    if r.ratio > c * (1.0 + FROZEN_SLACK) {
                        r.status = Status::Fail;
                        failures.push(format!("{:?}: ratio {} above ceiling {c}", r.point, r.ratio));
                    }
                }
            }
            Reference {
                kind,
                source: source.into(),
                c_min: None,
                c_max: ceiling,
            }
        }
        CheckKind::CalibratedLower => {
            let global = frozen.as_ref().and_then(|f| f.c_min);
            let (floor, source) = match global {
                Some(c) => (Some(c), "calibration"),
                None => (c_min, "measured"),
            };
            for r in records.iter_mut().filter(|r| r.status == Status::Pass) {
                let label = group_label(id, &r.point);
                let group_floor = frozen
                    .as_ref()
                    .and_then(|f| label.as_ref().and_then(|l| f.groups.get(l)))
                    .map(|g| g.c_min);
                if let Some(c) = group_floor.or(floor) {
                    if r.ratio < c * (1.0 - FROZEN_SLACK) {
                        r.status = Status::Fail;
                        failures.push(format!("{:?}: ratio {} below floor {c}", r.point, r.ratio));
                    }
                }
            }
            if let Some(c) = c_min {
                if !(c > 0.0) {
                    failures.push("implied lower constant is not positive".into());
                }
            }
            Reference {
                kind,
                source: source.into(),
                c_min: floor,
                c_max: None,
            }
        }
        CheckKind::Band => {
            let (lo, hi, source) = match frozen.as_ref() {
                Some(f) => (f.c_min, f.c_max, "calibration"),
                None => (c_min, c_max, "measured"),
            };
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if !(hi / lo <= 10.0) {
                    failures.push(format!("band width {} exceeds 10", hi / lo));
                }
                for r in records.iter_mut().filter(|r| r.status == Status::Pass) {
                    if r.ratio < lo * (1.0 - FROZEN_SLACK) || r.ratio > hi * (1.0 + FROZEN_SLACK) {
                        r.status = Status::Fail;
                        failures.push(format!("{:?}: value {} outside [{lo}, {hi}]", r.point, r.ratio));
                    }
                }
            }
            if id == BoundId::RadialBand {
                // R(p_* -> 2) <= C sqrt(d) on radial functions
                derived_constant = records
                    .iter()
                    .filter(|r| r.status != Status::Inconclusive)
                    .filter_map(|r| Some(r.lhs / (r.point.d? as f64).sqrt()))
                    .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
            }
            Reference {
                kind,
                source: source.into(),
                c_min: lo,
                c_max: hi,
            }
        }
        CheckKind::Trend => {
            judge_trend(id, &records, &labels, &mut failures);
            Reference {
                kind,
                source: "criterion".into(),
                c_min: None,
                c_max: None,
            }
        }
    };

    let inconclusive = records.iter().filter(|r| r.status == Status::Inconclusive).count();
    if records.is_empty() {
        failures.push("empty grid".into());
    }
    let status = if !failures.is_empty() || records.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if inconclusive > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    BoundSweepReport {
        bound_id: id,
        grid: grid.clone(),
        grid_hash: grid.hash(id, tol),
        tol,
        records,
        c_min,
        c_max,
        groups,
        derived_constant,
        reference,
        inconclusive,
        failures,
        status,
        pass: status == Status::Pass,
    }
}

fn judge_trend(id: BoundId, records: &[Record], labels: &[String], failures: &mut Vec<String>) {
    let by_d = |sel: &dyn Fn(&Record) -> bool| -> Vec<(u32, f64)> {
        let mut v: Vec<(u32, f64)> = records
            .iter()
            .filter(|r| sel(r) && r.status != Status::Inconclusive)
            .filter_map(|r| Some((r.point.d?, r.log_lhs)))
            .collect();
        v.sort_by_key(|x| x.0);
        v
    };
    let limit = |seq: &[(u32, f64)], target: f64, rel: f64, failures: &mut Vec<String>| {
        if let Some(&(d, l)) = seq.last() {
            let dev = (l - target).exp() - 1.0;
            if !(dev.abs() < rel) {
                failures.push(format!(
                    "d = {d}: relative deviation {dev:.4} from the limit is not below {rel}"
                ));
            }
        }
    };
    match id {
        BoundId::EllDLimit => {
            let seq = by_d(&|_| true);
            limit(&seq, 0.5 * (2.0 / std::f64::consts::E).ln(), 0.05, failures);
            let tail: Vec<f64> = seq.iter().filter(|x| x.0 >= 100).map(|x| x.1.exp()).collect();
            for w in tail.windows(3) {
                if (w[2] - w[1]).abs() > (w[1] - w[0]).abs() {
                    failures.push("successive differences of ell_d do not shrink".into());
                    break;
                }
            }
        }
        BoundId::HlsLimit => limit(&by_d(&|_| true), 0.0, 0.02, failures),
        BoundId::CompositeCdLimit => limit(&by_d(&|_| true), LN_2, 0.05, failures),
        BoundId::RadialTrendConv | BoundId::RadialTrendDiv | BoundId::GeneralUpperTrend => {
            for l in labels {
                let seq = by_d(&|r: &Record| group_label(id, &r.point).as_deref() == Some(l));
                if seq.is_empty() {
                    continue;
                }
                let vals: Vec<f64> = seq.iter().map(|x| x.1).collect();
                match id {
                    BoundId::RadialTrendConv => {
                        let peak = argmax(&vals);
                        if vals[peak..].windows(2).any(|w| w[1] >= w[0]) {
                            failures.push(format!("{l}: not eventually decreasing"));
                        }
                        if !seq.iter().any(|x| x.0 <= 150 && x.1 < 0.1f64.ln()) {
                            failures.push(format!("{l}: does not fall below 0.1 by d = 150"));
                        }
                    }
                    BoundId::RadialTrendDiv => {
                        let low = argmin(&vals);
                        if vals[low..].windows(2).any(|w| w[1] <= w[0]) {
                            failures.push(format!("{l}: not eventually increasing"));
                        }
                        if !seq.iter().any(|x| x.0 <= 200 && x.1 > 100f64.ln()) {
                            failures.push(format!("{l}: does not exceed 100 by d = 200"));
                        }
                    }
                    _ => {
                        if vals.windows(2).any(|w| w[1] >= w[0]) {
                            failures.push(format!("{l}: bound is not decreasing in d"));
                        }
                        let (d, v) = *seq.last().expect("non-empty");
                        if !(v < 0.01f64.ln()) {
                            failures.push(format!("{l}: bound {} at d = {d} is not below 1e-2", v.exp()));
                        }
                    }
                }
            }
        }
        _ => {}
    }
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_sampling_is_interior() {
        let a = alphas(-3.0, 0.5, 5, 0.01);
        assert_eq!(a.len(), 5);
        assert!((a[0] + 2.99).abs() < 1e-15 && (a[4] - 0.49).abs() < 1e-15);
    }

    #[test]
    fn explicit_record_decides_with_error() {
        let pt = Point::default();
        assert_eq!(explicit_record(pt.clone(), 0.5, 1e-12, 0f64).status, Status::Pass);
        assert_eq!(explicit_record(pt.clone(), 1.5, 1e-12, 0f64).status, Status::Fail);
        assert_eq!(explicit_record(pt, 1.0, 1e-12, 0f64).status, Status::Inconclusive);
    }
}
