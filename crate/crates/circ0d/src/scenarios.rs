//! Hypertension scenarios: named percentage modifications applied to a
//! baseline parameter set (three conditions, three severities each).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ParameterSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Systemic,
    Pulmonary,
    Renovascular,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Systemic, Condition::Pulmonary, Condition::Renovascular];

    pub fn label(self) -> &'static str {
        match self {
            Condition::Systemic => "systemic",
            Condition::Pulmonary => "pulmonary",
            Condition::Renovascular => "renovascular",
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "systemic" => Ok(Condition::Systemic),
            "pulmonary" => Ok(Condition::Pulmonary),
            "renovascular" => Ok(Condition::Renovascular),
            other => Err(Error::Domain(format!("unknown condition `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Mild,
    Moderate,
    Severe,
}

impl Severity {
    pub const ALL: [Severity; 3] = [Severity::Mild, Severity::Moderate, Severity::Severe];

    pub fn label(self) -> &'static str {
        match self {
            Severity::Mild => "mild",
            Severity::Moderate => "moderate",
            Severity::Severe => "severe",
        }
    }
}

impl std::str::FromStr for Severity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mild" => Ok(Severity::Mild),
            "moderate" => Ok(Severity::Moderate),
            "severe" => Ok(Severity::Severe),
            other => Err(Error::Domain(format!("unknown severity `{other}`"))),
        }
    }
}

/// One percentage change of one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modification {
    pub path: String,
    pub percent: f64,
}

/// A named set of percentage modifications relative to a baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub condition: Condition,
    pub severity: Severity,
    pub modifications: Vec<Modification>,
}

/// Scenario table rows: (path, [systemic m/mo/s], [pulmonary], [renovascular]),
/// percentages; `None` marks an absent entry.
type Row = (&'static str, [Option<f64>; 3], [Option<f64>; 3], [Option<f64>; 3]);

#[rustfmt::skip]
const SCENARIO_ROWS: [Row; 19] = [
    ("HR",                 [None, Some(5.0), Some(10.0)],      [None, Some(5.0), Some(10.0)],      [None, None, Some(10.0)]),
    ("chambers.LV.Ea",     [Some(10.0), Some(20.0), Some(40.0)], [Some(5.0), Some(10.0), Some(15.0)], [None, None, None]),
    ("chambers.LV.V0",     [None, None, Some(-10.0)],          [None, None, Some(-10.0)],          [None, None, None]),
    ("circ.SYS.AR.R",      [Some(10.0), Some(30.0), Some(50.0)], [None, None, Some(5.0)],          [Some(15.0), Some(40.0), Some(85.0)]),
    ("circ.SYS.AR.C",      [Some(-10.0), Some(-20.0), Some(-40.0)], [None, None, Some(-10.0)],     [Some(-10.0), Some(-15.0), Some(-25.0)]),
    ("circ.SYS.VEN.R",     [None, None, Some(5.0)],            [None, None, None],                 [None, None, None]),
    ("circ.SYS.VEN.C",     [None, None, Some(-5.0)],           [None, None, None],                 [None, None, None]),
    ("circ.PUL.AR.R",      [None, None, Some(10.0)],           [Some(20.0), Some(50.0), Some(100.0)], [Some(5.0), Some(15.0), Some(40.0)]),
    ("circ.PUL.AR.C",      [None, None, Some(-10.0)],          [Some(-10.0), Some(-25.0), Some(-50.0)], [None, None, None]),
    ("circ.PUL.VEN.R",     [None, None, None],                 [Some(10.0), Some(25.0), Some(50.0)], [None, None, None]),
    ("circ.PUL.VEN.C",     [None, None, None],                 [Some(-10.0), Some(-25.0), Some(-50.0)], [None, None, None]),
    ("capillary.R_C_SYS",  [None, None, Some(10.0)],           [None, None, None],                 [None, None, None]),
    ("capillary.C_C_SYS",  [None, None, Some(-20.0)],          [None, None, None],                 [None, None, None]),
    ("capillary.R_C_PUL",  [None, None, None],                 [Some(10.0), Some(30.0), Some(60.0)], [Some(5.0), Some(10.0), Some(25.0)]),
    ("capillary.C_C_PUL",  [None, None, None],                 [None, None, Some(-20.0)],          [None, None, None]),
    ("valves.AV.Rmin",     [Some(25.0), Some(50.0), Some(100.0)], [None, None, None],              [Some(25.0), Some(50.0), Some(100.0)]),
    ("valves.MV.Rmin",     [None, Some(10.0), Some(20.0)],     [None, None, None],                 [Some(10.0), Some(20.0), Some(30.0)]),
    ("valves.PV.Rmin",     [None, None, None],                 [Some(25.0), Some(50.0), Some(100.0)], [Some(25.0), Some(50.0), Some(100.0)]),
    ("valves.TV.Rmin",     [None, None, None],                 [Some(10.0), Some(25.0), Some(50.0)], [Some(10.0), Some(25.0), Some(50.0)]),
];

/// The built-in scenario for one (condition, severity) pair: the exact table
/// column, rows with absent entries omitted.
pub fn builtin(condition: Condition, severity: Severity) -> ScenarioSpec {
    let col = severity as usize;
    let modifications = SCENARIO_ROWS
        .iter()
        .filter_map(|(path, sys, pul, reno)| {
            let cell = match condition {
                Condition::Systemic => sys[col],
                Condition::Pulmonary => pul[col],
                Condition::Renovascular => reno[col],
            };
            cell.map(|percent| Modification { path: path.to_string(), percent })
        })
        .collect();
    ScenarioSpec { condition, severity, modifications }
}

impl ScenarioSpec {
    /// Applies the scenario: each listed parameter is scaled by
    /// (1 + percent/100); everything else is left untouched. The one
    /// exception is the HR row, which also rescales the chamber timings in
    /// proportion to the new heartbeat period (see
    /// [`ParameterSet::set_heart_rate_scaling_timings`]).
    pub fn apply(&self, base: &ParameterSet) -> Result<ParameterSet> {
        let mut out = base.clone();
        for m in &self.modifications {
            if m.percent <= -100.0 {
                return Err(Error::Domain(format!(
                    "modification of `{}` by {}% would zero or negate it",
                    m.path, m.percent
                )));
            }
            let factor = 1.0 + m.percent / 100.0;
            if m.path == "HR" {
                let hr = out.heart_rate * factor;
                out.set_heart_rate_scaling_timings(hr);
            } else {
                out.scale_path(&m.path, factor)?;
            }
        }
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("scenario document: {e}")))
    }
}
