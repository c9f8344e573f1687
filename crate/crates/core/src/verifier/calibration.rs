//! Frozen implied constants.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::format::{num, opt_num, round_sig};
use super::{BoundId, BoundSweepReport, CheckKind};
use crate::error::{Error, Result};

pub const CALIBRATION_VERSION: u32 = 1;

/// Environment variable naming the default calibration file.
pub const CALIBRATION_ENV: &str = "SRESTRICT_CALIBRATION";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    /// Ceiling for upper bounds.
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub c_max: Option<f64>,
    /// Floor for lower bounds.
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub c_min: Option<f64>,
    /// Per-group constants (for example per `p`), keyed by group label.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groups: BTreeMap<String, GroupLimits>,
    pub grid_hash: String,
    #[serde(with = "num")]
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLimits {
    #[serde(with = "num")]
    pub c_min: f64,
    #[serde(with = "num")]
    pub c_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub version: u32,
    pub bounds: BTreeMap<BoundId, CalibrationEntry>,
    /// Constant in `|hat sigma(xi)| <= C nu^{1/6} |xi|^{(1-d)/2}`.
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub c_bullet: Option<f64>,
    /// Constant in `R(p_* -> 2) <= C sqrt(d)`, measured on radial functions.
    #[serde(default, with = "opt_num", skip_serializing_if = "Option::is_none")]
    pub stein_tomas_c: Option<f64>,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            version: CALIBRATION_VERSION,
            bounds: BTreeMap::new(),
            c_bullet: None,
            stein_tomas_c: None,
        }
    }
}

impl Calibration {
    /// Freeze the measured extremes of every calibrated report, rounded as
    /// they are stored.
    pub fn from_reports(reports: &[BoundSweepReport]) -> Self {
        let mut cal = Calibration::default();
        let round = |x: Option<f64>| x.map(round_sig);
        for r in reports {
            let kind = r.bound_id.check_kind();
            let (c_min, c_max) = match kind {
                CheckKind::CalibratedUpper => (None, round(r.c_max)),
                CheckKind::CalibratedLower => (round(r.c_min), None),
                CheckKind::Band => (round(r.c_min), round(r.c_max)),
                _ => continue,
            };
            let groups = r
                .groups
                .iter()
                .map(|g| {
                    (
                        g.label.clone(),
                        GroupLimits {
                            c_min: round_sig(g.c_min),
                            c_max: round_sig(g.c_max),
                        },
                    )
                })
                .collect();
            cal.bounds.insert(
                r.bound_id,
                CalibrationEntry {
                    c_max,
                    c_min,
                    groups,
                    grid_hash: r.grid_hash.clone(),
                    tolerance: round_sig(r.tol),
                },
            );
            match r.bound_id {
                BoundId::SigmaHatBd => cal.c_bullet = round(r.c_max),
                BoundId::RadialBand => cal.stein_tomas_c = round(r.derived_constant),
                _ => {}
            }
        }
        cal
    }

    pub fn entry(&self, id: BoundId) -> Option<&CalibrationEntry> {
        self.bounds.get(&id)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cal: Calibration =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("malformed calibration file: {e}")))?;
        if cal.version != CALIBRATION_VERSION {
            return Err(Error::Config(format!(
                "calibration version {} is not supported (expected {CALIBRATION_VERSION})",
                cal.version
            )));
        }
        Ok(cal)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read calibration file {}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
