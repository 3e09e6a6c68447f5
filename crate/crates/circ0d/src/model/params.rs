//! Parameter space of the two closed-loop circulation variants.
//!
//! All quantities use the clinical unit system of the reference tables:
//! pressures in mmHg, volumes in mL, flows in mL/s, resistances in
//! mmHg·s/mL, inductances in mmHg·s²/mL, capacitances in mL/mmHg,
//! heart rate in 1/min.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model variant: without (`NC`) or with (`C`) the capillary network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "NC")]
    NonCapillary,
    #[serde(rename = "C")]
    Capillary,
}

impl Variant {
    pub fn state_dim(self) -> usize {
        match self {
            Variant::NonCapillary => 12,
            Variant::Capillary => 14,
        }
    }

    pub fn algebraic_dim(self) -> usize {
        match self {
            Variant::NonCapillary => 8,
            Variant::Capillary => 11,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::NonCapillary => "NC",
            Variant::Capillary => "C",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NC" => Ok(Variant::NonCapillary),
            "C" => Ok(Variant::Capillary),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant `{other}` (expected NC or C)"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// The four heart chambers, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chamber {
    LeftAtrium,
    LeftVentricle,
    RightAtrium,
    RightVentricle,
}

impl Chamber {
    pub const ALL: [Chamber; 4] = [
        Chamber::LeftAtrium,
        Chamber::LeftVentricle,
        Chamber::RightAtrium,
        Chamber::RightVentricle,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Chamber::LeftAtrium => "LA",
            Chamber::LeftVentricle => "LV",
            Chamber::RightAtrium => "RA",
            Chamber::RightVentricle => "RV",
        }
    }
}

/// The four heart valves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valve {
    Mitral,
    Aortic,
    Tricuspid,
    Pulmonary,
}

impl Valve {
    pub const ALL: [Valve; 4] = [Valve::Mitral, Valve::Aortic, Valve::Tricuspid, Valve::Pulmonary];

    pub fn label(self) -> &'static str {
        match self {
            Valve::Mitral => "MV",
            Valve::Aortic => "AV",
            Valve::Tricuspid => "TV",
            Valve::Pulmonary => "PV",
        }
    }
}

/// The four RLC branches of the vascular circulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    SystemicArterial,
    SystemicVenous,
    PulmonaryArterial,
    PulmonaryVenous,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch::SystemicArterial,
        Branch::SystemicVenous,
        Branch::PulmonaryArterial,
        Branch::PulmonaryVenous,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Branch::SystemicArterial => "AR_SYS",
            Branch::SystemicVenous => "VEN_SYS",
            Branch::PulmonaryArterial => "AR_PUL",
            Branch::PulmonaryVenous => "VEN_PUL",
        }
    }
}

/// Time-varying elastance element of one heart chamber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChamberParams {
    /// Active elastance amplitude E^a (mmHg/mL).
    #[serde(rename = "Ea")]
    pub active_elastance: f64,
    /// Passive (baseline) elastance E^p (mmHg/mL).
    #[serde(rename = "Ep")]
    pub passive_elastance: f64,
    /// Contraction duration T_C (s).
    #[serde(rename = "TC")]
    pub contraction_duration: f64,
    /// Relaxation duration T_R (s).
    #[serde(rename = "TR")]
    pub relaxation_duration: f64,
    /// Contraction onset t_C within the cycle (s).
    #[serde(rename = "tC")]
    pub contraction_onset: f64,
    /// Resting (unstressed) volume V_0 (mL).
    #[serde(rename = "V0")]
    pub resting_volume: f64,
}

/// Non-ideal diode model of one heart valve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValveParams {
    /// Open-valve resistance (mmHg·s/mL).
    #[serde(rename = "Rmin")]
    pub r_min: f64,
    /// Closed-valve (leak) resistance (mmHg·s/mL).
    #[serde(rename = "Rmax")]
    pub r_max: f64,
}

/// One resistance-inductance-capacitance vascular branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlcBranch {
    /// Resistance (mmHg·s/mL).
    #[serde(rename = "R")]
    pub resistance: f64,
    /// Inductance (mmHg·s²/mL).
    #[serde(rename = "L")]
    pub inductance: f64,
    /// Capacitance (mL/mmHg).
    #[serde(rename = "C")]
    pub capacitance: f64,
}

/// Capillary network parameters (variant C only), including the shunt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapillaryParams {
    #[serde(rename = "R_C_SYS")]
    pub r_sys: f64,
    #[serde(rename = "C_C_SYS")]
    pub c_sys: f64,
    #[serde(rename = "R_C_PUL")]
    pub r_pul: f64,
    #[serde(rename = "C_C_PUL")]
    pub c_pul: f64,
    #[serde(rename = "R_SH")]
    pub r_shunt: f64,
    #[serde(rename = "C_SH")]
    pub c_shunt: f64,
}

/// Chamber parameters keyed by chamber, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChamberSet {
    #[serde(rename = "LA")]
    pub la: ChamberParams,
    #[serde(rename = "LV")]
    pub lv: ChamberParams,
    #[serde(rename = "RA")]
    pub ra: ChamberParams,
    #[serde(rename = "RV")]
    pub rv: ChamberParams,
}

impl std::ops::Index<Chamber> for ChamberSet {
    type Output = ChamberParams;
    fn index(&self, c: Chamber) -> &ChamberParams {
        match c {
            Chamber::LeftAtrium => &self.la,
            Chamber::LeftVentricle => &self.lv,
            Chamber::RightAtrium => &self.ra,
            Chamber::RightVentricle => &self.rv,
        }
    }
}

impl std::ops::IndexMut<Chamber> for ChamberSet {
    fn index_mut(&mut self, c: Chamber) -> &mut ChamberParams {
        match c {
            Chamber::LeftAtrium => &mut self.la,
            Chamber::LeftVentricle => &mut self.lv,
            Chamber::RightAtrium => &mut self.ra,
            Chamber::RightVentricle => &mut self.rv,
        }
    }
}

/// Valve parameters keyed by valve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValveSet {
    #[serde(rename = "MV")]
    pub mv: ValveParams,
    #[serde(rename = "AV")]
    pub av: ValveParams,
    #[serde(rename = "TV")]
    pub tv: ValveParams,
    #[serde(rename = "PV")]
    pub pv: ValveParams,
}

impl std::ops::Index<Valve> for ValveSet {
    type Output = ValveParams;
    fn index(&self, v: Valve) -> &ValveParams {
        match v {
            Valve::Mitral => &self.mv,
            Valve::Aortic => &self.av,
            Valve::Tricuspid => &self.tv,
            Valve::Pulmonary => &self.pv,
        }
    }
}

impl std::ops::IndexMut<Valve> for ValveSet {
    fn index_mut(&mut self, v: Valve) -> &mut ValveParams {
        match v {
            Valve::Mitral => &mut self.mv,
            Valve::Aortic => &mut self.av,
            Valve::Tricuspid => &mut self.tv,
            Valve::Pulmonary => &mut self.pv,
        }
    }
}

/// Arterial and venous branches of one circulation side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideBranches {
    #[serde(rename = "AR")]
    pub arterial: RlcBranch,
    #[serde(rename = "VEN")]
    pub venous: RlcBranch,
}

/// Systemic and pulmonary RLC circulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circulation {
    #[serde(rename = "SYS")]
    pub systemic: SideBranches,
    #[serde(rename = "PUL")]
    pub pulmonary: SideBranches,
}

impl std::ops::Index<Branch> for Circulation {
    type Output = RlcBranch;
    fn index(&self, b: Branch) -> &RlcBranch {
        match b {
            Branch::SystemicArterial => &self.systemic.arterial,
            Branch::SystemicVenous => &self.systemic.venous,
            Branch::PulmonaryArterial => &self.pulmonary.arterial,
            Branch::PulmonaryVenous => &self.pulmonary.venous,
        }
    }
}

impl std::ops::IndexMut<Branch> for Circulation {
    fn index_mut(&mut self, b: Branch) -> &mut RlcBranch {
        match b {
            Branch::SystemicArterial => &mut self.systemic.arterial,
            Branch::SystemicVenous => &mut self.systemic.venous,
            Branch::PulmonaryArterial => &mut self.pulmonary.arterial,
            Branch::PulmonaryVenous => &mut self.pulmonary.venous,
        }
    }
}

/// The full named parameter vector of one model variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub variant: Variant,
    /// Heart rate (1/min); the heartbeat period is T_HB = 60/HR.
    #[serde(rename = "HR")]
    pub heart_rate: f64,
    /// External (pericardial/respiratory) pressure p_EX (mmHg), 0 in this work.
    #[serde(rename = "p_EX", default)]
    pub external_pressure: f64,
    pub chambers: ChamberSet,
    pub valves: ValveSet,
    #[serde(rename = "circ")]
    pub circulation: Circulation,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub capillary: Option<CapillaryParams>,
}

impl ParameterSet {
    /// Heartbeat period T_HB = 60/HR (s).
    pub fn period(&self) -> f64 {
        60.0 / self.heart_rate
    }

    /// Changes the heart rate and rescales every chamber timing
    /// (contraction/relaxation durations and onsets) in proportion to the
    /// new period, so the cycle keeps its phase structure. A faster heart
    /// contracts faster; leaving the timings in absolute seconds would
    /// swallow the diastolic filling window instead.
    pub fn set_heart_rate_scaling_timings(&mut self, heart_rate: f64) {
        let ratio = self.heart_rate / heart_rate;
        self.heart_rate = heart_rate;
        for c in Chamber::ALL {
            let ch = &mut self.chambers[c];
            ch.contraction_duration *= ratio;
            ch.relaxation_duration *= ratio;
            ch.contraction_onset *= ratio;
        }
    }

    pub fn state_dim(&self) -> usize {
        self.variant.state_dim()
    }

    /// Checks every structural invariant; returns the first violation found.
    pub fn validate(&self) -> Result<()> {
        if !(self.heart_rate > 0.0) {
            return Err(Error::InvalidParameter(format!("HR must be > 0, got {}", self.heart_rate)));
        }
        let t_hb = self.period();
        for c in Chamber::ALL {
            let ch = &self.chambers[c];
            let name = c.label();
            if !(ch.active_elastance > 0.0) || !(ch.passive_elastance > 0.0) {
                return Err(Error::InvalidParameter(format!("chambers.{name}: elastances must be > 0")));
            }
            if !(ch.contraction_duration > 0.0) || !(ch.relaxation_duration > 0.0) {
                return Err(Error::InvalidParameter(format!("chambers.{name}: TC and TR must be > 0")));
            }
            if !(0.0..t_hb).contains(&ch.contraction_onset) {
                return Err(Error::InvalidParameter(format!(
                    "chambers.{name}: tC = {} outside [0, T_HB = {t_hb})",
                    ch.contraction_onset
                )));
            }
            if !(ch.resting_volume >= 0.0) {
                return Err(Error::InvalidParameter(format!("chambers.{name}: V0 must be >= 0")));
            }
        }
        for v in Valve::ALL {
            let vp = &self.valves[v];
            if !(vp.r_min > 0.0 && vp.r_min < vp.r_max) {
                return Err(Error::InvalidParameter(format!(
                    "valves.{}: requires 0 < Rmin < Rmax",
                    v.label()
                )));
            }
        }
        for b in Branch::ALL {
            let br = &self.circulation[b];
            if !(br.resistance > 0.0 && br.inductance > 0.0 && br.capacitance > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "circ.{}: R, L, C must all be > 0",
                    b.label()
                )));
            }
        }
        match (self.variant, &self.capillary) {
            (Variant::Capillary, Some(cap)) => {
                let all = [cap.r_sys, cap.c_sys, cap.r_pul, cap.c_pul, cap.r_shunt, cap.c_shunt];
                if !all.iter().all(|x| *x > 0.0) {
                    return Err(Error::InvalidParameter(
                        "capillary: all parameters must be > 0".into(),
                    ));
                }
            }
            (Variant::Capillary, None) => {
                return Err(Error::VariantMismatch(
                    "variant C requires a [capillary] section".into(),
                ))
            }
            (Variant::NonCapillary, Some(_)) => {
                return Err(Error::VariantMismatch(
                    "variant NC must not carry a [capillary] section".into(),
                ))
            }
            (Variant::NonCapillary, None) => {}
        }
        Ok(())
    }

    /// Parses and validates a TOML parameter document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let params: ParameterSet =
            toml::from_str(text).map_err(|e| Error::Format(format!("parameter document: {e}")))?;
        params.validate()?;
        Ok(params)
    }

    /// Serializes to the TOML parameter document format.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("parameter set serializes")
    }

    /// Reference healthy parameter values for the requested variant.
    pub fn healthy(variant: Variant) -> Self {
        let text = match variant {
            Variant::NonCapillary => include_str!("../../params/healthy_nc.toml"),
            Variant::Capillary => include_str!("../../params/healthy_c.toml"),
        };
        Self::from_toml(text).expect("built-in parameter document is valid")
    }
}
