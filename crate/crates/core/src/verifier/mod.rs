//! Parameter sweeps over the Bessel and restriction bounds, implied-constant
//! extraction and deterministic reports.
//!
//! Points of a sweep are evaluated in parallel; results are collected in grid
//! order, so reports do not depend on scheduling.

mod calibration;
mod envelope;
pub mod format;
mod grid;
mod sweeps;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use calibration::{Calibration, CalibrationEntry, GroupLimits, CALIBRATION_ENV, CALIBRATION_VERSION};
pub use envelope::{stempak_envelope, upper_power, StempakEnvelope};
pub use grid::{parse_dims, parse_list, GridSpec, D_MAX, D_MAX_CLOSED_FORM, NU_MAX, P_MAX};

use crate::error::{Error, Result};
use format::{num, opt_num};

/// Relative slack when comparing against frozen constants, which are stored
/// with 12 significant digits.
const FROZEN_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundId {
    StempakUpper,
    StempakInf,
    StempakLower,
    StempakLowerInf,
    Bessel2,
    Bessel3,
    Bessel4,
    Bessel1,
    #[serde(rename = "krasikov")]
    KrasikovError,
    SigmaHatBd,
    #[serde(rename = "ell-d")]
    EllDLimit,
    HlsLimit,
    #[serde(rename = "composite-cd")]
    CompositeCdLimit,
    RadialBand,
    RadialTrendConv,
    RadialTrendDiv,
    GeneralUpperTrend,
}

/// How the ratios of a sweep are judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `lhs <= rhs` with constant exactly 1.
    ExplicitUpper,
    /// `ratio <= frozen ceiling`.
    CalibratedUpper,
    /// `ratio >= frozen floor`.
    CalibratedLower,
    /// All values inside a frozen band of bounded width.
    Band,
    /// A limit or monotone trend along a dimension sequence.
    Trend,
}

impl BoundId {
    pub const ALL: [BoundId; 17] = [
        BoundId::StempakUpper,
        BoundId::StempakInf,
        BoundId::StempakLower,
        BoundId::StempakLowerInf,
        BoundId::Bessel2,
        BoundId::Bessel3,
        BoundId::Bessel4,
        BoundId::Bessel1,
        BoundId::KrasikovError,
        BoundId::SigmaHatBd,
        BoundId::EllDLimit,
        BoundId::HlsLimit,
        BoundId::CompositeCdLimit,
        BoundId::RadialBand,
        BoundId::RadialTrendConv,
        BoundId::RadialTrendDiv,
        BoundId::GeneralUpperTrend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::StempakUpper => "stempak-upper",
            BoundId::StempakInf => "stempak-inf",
            BoundId::StempakLower => "stempak-lower",
            BoundId::StempakLowerInf => "stempak-lower-inf",
            BoundId::Bessel2 => "bessel2",
            BoundId::Bessel3 => "bessel3",
            BoundId::Bessel4 => "bessel4",
            BoundId::Bessel1 => "bessel1",
            BoundId::KrasikovError => "krasikov",
            BoundId::SigmaHatBd => "sigma-hat-bd",
            BoundId::EllDLimit => "ell-d",
            BoundId::HlsLimit => "hls-limit",
            BoundId::CompositeCdLimit => "composite-cd",
            BoundId::RadialBand => "radial-band",
            BoundId::RadialTrendConv => "radial-trend-conv",
            BoundId::RadialTrendDiv => "radial-trend-div",
            BoundId::GeneralUpperTrend => "general-upper-trend",
        }
    }

    pub fn check_kind(self) -> CheckKind {
        match self {
            BoundId::Bessel2 | BoundId::Bessel3 | BoundId::KrasikovError => CheckKind::ExplicitUpper,
            BoundId::StempakUpper | BoundId::StempakInf | BoundId::Bessel4 | BoundId::Bessel1 | BoundId::SigmaHatBd => {
                CheckKind::CalibratedUpper
            }
            BoundId::StempakLower | BoundId::StempakLowerInf => CheckKind::CalibratedLower,
            BoundId::RadialBand => CheckKind::Band,
            BoundId::EllDLimit
            | BoundId::HlsLimit
            | BoundId::CompositeCdLimit
            | BoundId::RadialTrendConv
            | BoundId::RadialTrendDiv
            | BoundId::GeneralUpperTrend => CheckKind::Trend,
        }
    }

    /// Bounds whose left-hand side is closed-form in `d`.
    pub fn closed_form_in_d(self) -> bool {
        matches!(
            self,
            BoundId::EllDLimit | BoundId::HlsLimit | BoundId::CompositeCdLimit | BoundId::GeneralUpperTrend
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "krasikov-error" => "krasikov",
            "ell-d-limit" => "ell-d",
            "composite-cd-limit" => "composite-cd",
            other => other,
        };
        BoundId::ALL.into_iter().find(|b| b.name() == alias).ok_or_else(|| {
            let names: Vec<_> = BoundId::ALL.iter().map(|b| b.name()).collect();
            Error::Parameter(format!("unknown bound '{s}'; expected one of {}", names.join(", ")))
        })
    }
}

/// Parameters of one grid point; unused coordinates are absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

impl FromStr for Status {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Status::Pass),
            "fail" => Ok(Status::Fail),
            "inconclusive" => Ok(Status::Inconclusive),
            _ => Err(Error::Parameter(format!("unknown status '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub point: Point,
    #[serde(with = "num")]
    pub lhs: f64,
    #[serde(with = "num")]
    pub rhs_envelope: f64,
    #[serde(with = "num")]
    pub ratio: f64,
    #[serde(with = "num")]
    pub log_lhs: f64,
    #[serde(with = "num")]
    pub log_rhs: f64,
    /// Relative error bound of `lhs`.
    #[serde(with = "num")]
    pub lhs_rel_error: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    /// Build from log values; `ratio = exp(log_lhs - log_rhs)`.
    pub(crate) fn from_logs(point: Point, log_lhs: f64, log_rhs: f64, lhs_rel_error: f64) -> Self {
        Self {
            point,
            lhs: log_lhs.exp(),
            rhs_envelope: log_rhs.exp(),
            ratio: (log_lhs - log_rhs).exp(),
            log_lhs,
            log_rhs,
            lhs_rel_error,
            status: Status::Pass,
            note: None,
        }
    }

    pub(crate) fn inconclusive(point: Point, note: impl Into<String>) -> Self {
        Self {
            point,
            lhs: f64::NAN,
            rhs_envelope: f64::NAN,
            ratio: f64::NAN,
            log_lhs: f64::NAN,
            log_rhs: f64::NAN,
            lhs_rel_error: f64::INFINITY,
            status: Status::Inconclusive,
            note: Some(note.into()),
        }
    }
}

/// Extremes of the ratio over one group of records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupConstant {
    pub label: String,
    #[serde(with = "num")]
    pub c_min: f64,
    #[serde(with = "num")]
    pub c_max: f64,
}

/// What the ratios were compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub kind: CheckKind,
    /// `explicit`, `calibration`, `measured` or `criterion`.
    pub source: String,
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub c_min: Option<f64>,
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub c_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSweepReport {
    pub bound_id: BoundId,
    pub grid: GridSpec,
    pub grid_hash: String,
    #[serde(with = "num")]
    pub tol: f64,
    pub records: Vec<Record>,
    #[serde(with = "opt_num")]
    pub c_min: Option<f64>,
    #[serde(with = "opt_num")]
    pub c_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupConstant>,
    /// A constant derived from the sweep and consumed elsewhere, such as the
    /// Stein–Tomas constant from the radial band.
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub derived_constant: Option<f64>,
    pub reference: Reference,
    pub inconclusive: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub status: Status,
    pub pass: bool,
}

impl BoundSweepReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One line per record.
    pub fn to_csv(&self) -> String {
        records_to_csv(self.bound_id, &self.records)
    }
}

pub const CSV_HEADER: &str = "bound_id,nu,p,q,alpha,r,d,lhs,rhs_envelope,ratio,log_lhs,log_rhs,lhs_rel_error,status";

pub fn records_to_csv(id: BoundId, records: &[Record]) -> String {
    use format::machine;
    let opt = |x: Option<f64>| x.map(machine).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let row = [
            id.name().to_string(),
            opt(r.point.nu),
            opt(r.point.p),
            opt(r.point.q),
            opt(r.point.alpha),
            opt(r.point.r),
            r.point.d.map(|d| d.to_string()).unwrap_or_default(),
            machine(r.lhs),
            machine(r.rhs_envelope),
            machine(r.ratio),
            machine(r.log_lhs),
            machine(r.log_rhs),
            machine(r.lhs_rel_error),
            r.status.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Inverse of [`records_to_csv`]; notes are not carried by the CSV form.
pub fn records_from_csv(s: &str) -> Result<(Option<BoundId>, Vec<Record>)> {
    let mut lines = s.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parameter("unexpected CSV header".into()));
    }
    let bad = |l: &str| Error::Parameter(format!("malformed CSV row '{l}'"));
    let mut id = None;
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(bad(line));
        }
        id = Some(f[0].parse::<BoundId>()?);
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                format::parse_machine(s).map(Some).ok_or_else(|| bad(line))
            }
        };
        let req = |s: &str| format::parse_machine(s).ok_or_else(|| bad(line));
        out.push(Record {
            point: Point {
                nu: opt(f[1])?,
                p: opt(f[2])?,
                q: opt(f[3])?,
                alpha: opt(f[4])?,
                r: opt(f[5])?,
                d: if f[6].is_empty() {
                    None
                } else {
                    Some(f[6].parse().map_err(|_| bad(line))?)
                },
            },
            lhs: req(f[7])?,
            rhs_envelope: req(f[8])?,
            ratio: req(f[9])?,
            log_lhs: req(f[10])?,
            log_rhs: req(f[11])?,
            lhs_rel_error: req(f[12])?,
            status: f[13].parse()?,
            note: None,
        });
    }
    Ok((id, out))
}

type NormKey = (u64, u64, u64, u64);

/// Shared state of a run: frozen constants, constants measured earlier in
/// the run, and a cache of weighted norms shared between the upper and
/// lower sweeps.
#[derive(Default)]
pub struct SweepContext {
    pub calibration: Option<Calibration>,
    pub c_bullet: Option<f64>,
    pub stein_tomas_c: Option<f64>,
    norms: Mutex<HashMap<NormKey, (f64, f64, bool)>>,
}

impl SweepContext {
    pub fn new(calibration: Option<Calibration>) -> Self {
        let c_bullet = calibration.as_ref().and_then(|c| c.c_bullet);
        let stein_tomas_c = calibration.as_ref().and_then(|c| c.stein_tomas_c);
        Self {
            calibration,
            c_bullet,
            stein_tomas_c,
            norms: Mutex::new(HashMap::new()),
        }
    }

    /// `(log N, rel_error, converged)`.
    pub(crate) fn norm(&self, nu: f64, p: f64, alpha: f64, tol: f64) -> Result<(f64, f64, bool)> {
        let key = (nu.to_bits(), p.to_bits(), alpha.to_bits(), tol.to_bits());
        if let Some(v) = self.norms.lock().expect("norm cache poisoned").get(&key) {
            return Ok(*v);
        }
        let q = crate::weighted::NormQuery::new(nu, p, alpha, tol)?;
        let r = crate::weighted::weighted_norm(&q)?;
        let v = (r.log_value, r.rel_error, r.converged);
        self.norms.lock().expect("norm cache poisoned").insert(key, v);
        Ok(v)
    }

    /// `c_bullet`, measuring it on the default grid if it is not known.
    pub fn c_bullet_or_measure(&self, tol: f64) -> Result<f64> {
        if let Some(c) = self.c_bullet {
            return Ok(c);
        }
        let grid = GridSpec::default_for(BoundId::SigmaHatBd);
        let rep = sweeps::run(BoundId::SigmaHatBd, &grid, tol, self)?;
        rep.c_max
            .ok_or_else(|| Error::Config("could not measure c_bullet".into()))
    }

    pub fn stein_tomas_or_measure(&self, tol: f64) -> Result<f64> {
        if let Some(c) = self.stein_tomas_c {
            return Ok(c);
        }
        let grid = GridSpec::default_for(BoundId::RadialBand);
        let rep = sweeps::run(BoundId::RadialBand, &grid, tol, self)?;
        rep.derived_constant
            .ok_or_else(|| Error::Config("could not measure the Stein-Tomas constant".into()))
    }
}

/// Evaluate one bound over a grid. Deterministic in `(id, grid, tol)` and
/// the calibration held by `ctx`.
pub fn run_sweep(id: BoundId, grid: &GridSpec, tol: f64, ctx: &SweepContext) -> Result<BoundSweepReport> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::Parameter(format!("tol must lie in (0, 1e-2], got {tol:e}")));
    }
    grid.validate(id)?;
    sweeps::run(id, grid, tol, ctx)
}

/// The implied constant of a bound: the largest ratio for upper bounds, the
/// smallest for lower bounds.
pub fn calibrate_constant(id: BoundId, grid: &GridSpec, tol: f64) -> Result<f64> {
    let ctx = SweepContext::new(None);
    let rep = run_sweep(id, grid, tol, &ctx)?;
    let c = match id.check_kind() {
        CheckKind::CalibratedLower => rep.c_min,
        CheckKind::CalibratedUpper | CheckKind::ExplicitUpper => rep.c_max,
        CheckKind::Band | CheckKind::Trend => {
            return Err(Error::Parameter(format!("{id} has no single implied constant")));
        }
    };
    c.ok_or_else(|| Error::Parameter(format!("{id}: no conclusive points on the grid")))
}

/// Run `f` on a pool of `threads` workers.
pub fn with_parallelism<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Err(Error::Parameter("parallelism must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub reports: Vec<BoundSweepReport>,
}

impl VerifyReport {
    pub fn failing(&self) -> Vec<BoundId> {
        self.reports.iter().filter(|r| !r.pass).map(|r| r.bound_id).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Run every bound on its grid (default unless overridden). Without a
/// calibration the measured constants are frozen into a new one, returned
/// alongside the report.
pub fn verify_all(
    tol: f64,
    calibration: Option<Calibration>,
    overrides: &HashMap<BoundId, GridSpec>,
) -> Result<(VerifyReport, Option<Calibration>)> {
    let fresh = calibration.is_none();
    let mut ctx = SweepContext::new(calibration);
    let grid_for = |id: BoundId| overrides.get(&id).cloned().unwrap_or_else(|| GridSpec::default_for(id));

    // constants consumed by later bounds come first
    let sigma = run_sweep(BoundId::SigmaHatBd, &grid_for(BoundId::SigmaHatBd), tol, &ctx)?;
    let band = run_sweep(BoundId::RadialBand, &grid_for(BoundId::RadialBand), tol, &ctx)?;
    if ctx.c_bullet.is_none() {
        ctx.c_bullet = sigma.c_max;
    }
    if ctx.stein_tomas_c.is_none() {
        ctx.stein_tomas_c = band.derived_constant;
    }
    let mut reports = Vec::with_capacity(BoundId::ALL.len());
    for id in BoundId::ALL {
        let rep = match id {
            BoundId::SigmaHatBd => sigma.clone(),
            BoundId::RadialBand => band.clone(),
            _ => run_sweep(id, &grid_for(id), tol, &ctx)?,
        };
        reports.push(rep);
    }
    let new_cal = fresh.then(|| Calibration::from_reports(&reports));
    let pass = reports.iter().all(|r| r.pass);
    Ok((VerifyReport { pass, reports }, new_cal))
}

pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}
