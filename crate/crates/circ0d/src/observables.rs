//! Time-independent outputs, PV-loop stroke work and healthy-range verdicts
//! computed from a last-beat trace.
//!
//! 45 scalar outputs are produced for the non-capillary variant and 46 for
//! the capillary variant (which adds the shunt fraction S_f). Indexed
//! volumes are normalized by body surface area; means use the trapezoidal
//! rule over the final heartbeat.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::engine::SimulationTrace;
use crate::error::{Error, Result};
use crate::model::{
    Chamber, ParameterSet, VarId, Variant, P_AR_PUL, P_AR_SYS, P_LA, P_LV, P_RA, P_RV, P_VEN_PUL,
    Q_AV, Q_SH, V_LA, V_LV, V_RA, V_RV,
};

/// Body metrics needed to index volumes and flows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyMetrics {
    /// Body surface area (m²).
    pub bsa: f64,
}

impl Default for BodyMetrics {
    fn default() -> Self {
        BodyMetrics { bsa: 1.9 }
    }
}

impl BodyMetrics {
    /// BSA pinned per variant so the healthy reference runs land inside the
    /// published output ranges (the two parameterizations describe
    /// differently sized effective patients; see the shipped parameter
    /// documents).
    pub fn default_for(variant: Variant) -> Self {
        match variant {
            Variant::NonCapillary => BodyMetrics { bsa: 1.557 },
            Variant::Capillary => BodyMetrics { bsa: 1.43 },
        }
    }
}

/// Relative closure tolerance for PV loops (fraction of the loop's span).
const LOOP_CLOSURE_TOL: f64 = 0.05;

/// Named scalar outputs of one converged run, in canonical report order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputReport {
    pub variant: Variant,
    values: IndexMap<String, f64>,
}

impl OutputReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Flat JSON object keyed by output name, insertion (table) order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.values).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let values: IndexMap<String, f64> =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("report: {e}")))?;
        let variant =
            if values.contains_key("S_f") { Variant::Capillary } else { Variant::NonCapillary };
        Ok(OutputReport { variant, values })
    }
}

/// Canonical output names for a variant, report order.
pub fn output_names(variant: Variant) -> Vec<String> {
    let mut names = Vec::with_capacity(46);
    for atrium in ["LA", "RA"] {
        for field in
            ["IVmax", "IVmin", "IVpreAC", "PassEF", "ActEF", "TotEF", "Pmax", "Pmin", "Pmean"]
        {
            names.push(format!("{atrium}_{field}"));
        }
    }
    for ventricle in ["LV", "RV"] {
        for field in ["ISV", "IEDV", "IESV", "EF", "Pmax", "Pmin"] {
            names.push(format!("{ventricle}_{field}"));
        }
    }
    for other in [
        "CO", "CI", "SAP_max", "SAP_min", "PAP_max", "PAP_min", "PAP_mean", "PWP_max", "PWP_min",
        "PWP_mean", "SVR", "PVR", "max_grad_p_rAV", "LV_SW", "RV_SW",
    ] {
        names.push(other.to_string());
    }
    if variant == Variant::Capillary {
        names.push("S_f".to_string());
    }
    names
}

/// Trapezoidal mean of a sampled variable over the uniform window.
fn trapezoid_mean(samples: &[f64]) -> f64 {
    let n = samples.len();
    debug_assert!(n >= 2);
    let interior: f64 = samples[1..n - 1].iter().sum();
    (0.5 * (samples[0] + samples[n - 1]) + interior) / (n - 1) as f64
}

fn max_of(samples: &[f64]) -> f64 {
    samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(samples: &[f64]) -> f64 {
    samples.iter().copied().fold(f64::INFINITY, f64::min)
}

fn require_last_beat(trace: &SimulationTrace) -> Result<()> {
    let steps = trace.steps_per_beat();
    if trace.len() != steps + 1 {
        return Err(Error::Window(format!(
            "expected a last-beat window of {} nodes, got {}",
            steps + 1,
            trace.len()
        )));
    }
    Ok(())
}

/// Unsigned area enclosed by the (V, p) loop of one chamber over the beat,
/// in mmHg·L (stroke work for the ventricles).
pub fn pv_loop_area(trace: &SimulationTrace, chamber: Chamber) -> Result<f64> {
    require_last_beat(trace)?;
    let v_idx = match chamber {
        Chamber::LeftAtrium => V_LA,
        Chamber::LeftVentricle => V_LV,
        Chamber::RightAtrium => V_RA,
        Chamber::RightVentricle => V_RV,
    };
    let p_idx = match chamber {
        Chamber::LeftAtrium => P_LA,
        Chamber::LeftVentricle => P_LV,
        Chamber::RightAtrium => P_RA,
        Chamber::RightVentricle => P_RV,
    };
    let v = trace.series(VarId::State(v_idx));
    let p = trace.series(VarId::Algebraic(p_idx));
    shoelace_area(&v, &p).map(|a| a / 1000.0)
}

/// Shoelace area of the closed polygon built from matched (x, y) samples
/// whose first and last points coincide within a closure tolerance.
pub(crate) fn shoelace_area(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(Error::Window("loop needs at least 3 matched samples".into()));
    }
    let x_span = max_of(x) - min_of(x);
    let y_span = max_of(y) - min_of(y);
    let gap_x = (x[n - 1] - x[0]).abs();
    let gap_y = (y[n - 1] - y[0]).abs();
    if gap_x > LOOP_CLOSURE_TOL * x_span.max(1e-12) || gap_y > LOOP_CLOSURE_TOL * y_span.max(1e-12)
    {
        return Err(Error::NonPeriodicTrace(format!(
            "loop endpoints differ by ({gap_x:.3e}, {gap_y:.3e}) against spans ({x_span:.3e}, {y_span:.3e})"
        )));
    }
    // drop the duplicated endpoint and close the polygon explicitly
    let m = n - 1;
    let mut twice_area = 0.0;
    for i in 0..m {
        let j = (i + 1) % m;
        twice_area += x[i] * y[j] - x[j] * y[i];
    }
    Ok(0.5 * twice_area.abs())
}

/// Computes the full output report from a converged last-beat trace.
pub fn compute_outputs(
    trace: &SimulationTrace,
    params: &ParameterSet,
    body: &BodyMetrics,
) -> Result<OutputReport> {
    require_last_beat(trace)?;
    if trace.variant != params.variant {
        return Err(Error::VariantMismatch(format!(
            "trace is variant {} but parameters are {}",
            trace.variant, params.variant
        )));
    }
    if !(body.bsa > 0.0) {
        return Err(Error::Domain("BSA must be > 0".into()));
    }
    let bsa = body.bsa;
    let mut values: IndexMap<String, f64> = IndexMap::with_capacity(46);

    // Atria: indexed volumes, filling phases, pressures.
    for (label, v_idx, p_idx, chamber) in [
        ("LA", V_LA, P_LA, Chamber::LeftAtrium),
        ("RA", V_RA, P_RA, Chamber::RightAtrium),
    ] {
        let v = trace.series(VarId::State(v_idx));
        let p = trace.series(VarId::Algebraic(p_idx));
        let v_max = max_of(&v);
        let v_min = min_of(&v);
        // volume immediately before atrial contraction, sampled at the
        // atrium's activation onset within the beat
        let t_c = params.chambers[chamber].contraction_onset.rem_euclid(trace.t_hb);
        let pre_ac_node = ((t_c / trace.dt).round() as usize).min(v.len() - 1);
        let v_pre_ac = v[pre_ac_node];
        values.insert(format!("{label}_IVmax"), v_max / bsa);
        values.insert(format!("{label}_IVmin"), v_min / bsa);
        values.insert(format!("{label}_IVpreAC"), v_pre_ac / bsa);
        values.insert(format!("{label}_PassEF"), (v_max - v_pre_ac) / v_max * 100.0);
        values.insert(format!("{label}_ActEF"), (v_pre_ac - v_min) / v_pre_ac * 100.0);
        values.insert(format!("{label}_TotEF"), (v_max - v_min) / v_max * 100.0);
        values.insert(format!("{label}_Pmax"), max_of(&p));
        values.insert(format!("{label}_Pmin"), min_of(&p));
        values.insert(format!("{label}_Pmean"), trapezoid_mean(&p));
    }

    // Ventricles: indexed volumes, ejection fraction, pressures.
    for (label, v_idx, p_idx) in [("LV", V_LV, P_LV), ("RV", V_RV, P_RV)] {
        let v = trace.series(VarId::State(v_idx));
        let p = trace.series(VarId::Algebraic(p_idx));
        let v_max = max_of(&v);
        let v_min = min_of(&v);
        values.insert(format!("{label}_ISV"), (v_max - v_min) / bsa);
        values.insert(format!("{label}_IEDV"), v_max / bsa);
        values.insert(format!("{label}_IESV"), v_min / bsa);
        values.insert(format!("{label}_EF"), (v_max - v_min) / v_max * 100.0);
        values.insert(format!("{label}_Pmax"), max_of(&p));
        values.insert(format!("{label}_Pmin"), min_of(&p));
    }

    // Systemic/pulmonary pressures and derived hemodynamic indices.
    let p_ar_sys = trace.series(VarId::State(P_AR_SYS));
    let p_ar_pul = trace.series(VarId::State(P_AR_PUL));
    let p_ven_pul = trace.series(VarId::State(P_VEN_PUL));
    let q_av = trace.series(VarId::Algebraic(Q_AV));
    let p_la = trace.series(VarId::Algebraic(P_LA));
    let p_ra = trace.series(VarId::Algebraic(P_RA));
    let p_rv = trace.series(VarId::Algebraic(P_RV));

    let mean_q_av = trapezoid_mean(&q_av); // mL/s
    let co = mean_q_av * 60.0 / 1000.0; // L/min
    values.insert("CO".into(), co);
    values.insert("CI".into(), co / bsa);
    values.insert("SAP_max".into(), max_of(&p_ar_sys));
    values.insert("SAP_min".into(), min_of(&p_ar_sys));
    values.insert("PAP_max".into(), max_of(&p_ar_pul));
    values.insert("PAP_min".into(), min_of(&p_ar_pul));
    values.insert("PAP_mean".into(), trapezoid_mean(&p_ar_pul));
    // pulmonary wedge pressure proxied by pulmonary venous pressure
    values.insert("PWP_max".into(), max_of(&p_ven_pul));
    values.insert("PWP_min".into(), min_of(&p_ven_pul));
    values.insert("PWP_mean".into(), trapezoid_mean(&p_ven_pul));
    values.insert("SVR".into(), (trapezoid_mean(&p_ar_sys) - trapezoid_mean(&p_ra)) / co);
    values.insert("PVR".into(), (trapezoid_mean(&p_ar_pul) - trapezoid_mean(&p_la)) / co);
    values.insert("max_grad_p_rAV".into(), max_of(&p_rv) - min_of(&p_ar_pul));
    values.insert("LV_SW".into(), pv_loop_area(trace, Chamber::LeftVentricle)?);
    values.insert("RV_SW".into(), pv_loop_area(trace, Chamber::RightVentricle)?);

    if params.variant == Variant::Capillary {
        let q_sh = trace.series(VarId::Algebraic(Q_SH));
        values.insert("S_f".into(), trapezoid_mean(&q_sh) / mean_q_av / bsa);
    }

    debug_assert_eq!(values.len(), output_names(params.variant).len());
    Ok(OutputReport { variant: params.variant, values })
}

/// Closed healthy interval for one output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HealthyRange {
    pub lo: f64,
    pub hi: f64,
    pub unit: &'static str,
}

/// Healthy ranges of the reference output tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HealthyRanges {
    ranges: IndexMap<String, HealthyRange>,
}

impl HealthyRanges {
    /// The published healthy ranges; S_f only applies to variant C.
    pub fn builtin(variant: Variant) -> Self {
        let mut ranges = IndexMap::new();
        let mut add = |name: &str, lo: f64, hi: f64, unit: &'static str| {
            ranges.insert(name.to_string(), HealthyRange { lo, hi, unit });
        };
        // left atrium
        add("LA_IVmax", 24.0, 57.0, "mL/m^2");
        add("LA_IVmin", 9.0, 28.0, "mL/m^2");
        add("LA_IVpreAC", 15.0, 46.0, "mL/m^2");
        add("LA_PassEF", 8.0, 44.0, "%");
        add("LA_ActEF", 17.0, 58.0, "%");
        add("LA_TotEF", 37.0, 70.0, "%");
        add("LA_Pmax", 6.0, 20.0, "mmHg");
        add("LA_Pmin", -2.0, 9.0, "mmHg");
        add("LA_Pmean", 4.0, 12.0, "mmHg");
        // right atrium
        add("RA_IVmax", 28.0, 76.0, "mL/m^2");
        add("RA_IVmin", 9.0, 45.0, "mL/m^2");
        add("RA_IVpreAC", 19.0, 61.0, "mL/m^2");
        add("RA_PassEF", 4.0, 41.0, "%");
        add("RA_ActEF", 11.0, 55.0, "%");
        add("RA_TotEF", 29.0, 68.0, "%");
        add("RA_Pmax", 2.0, 14.0, "mmHg");
        add("RA_Pmin", -2.0, 6.0, "mmHg");
        add("RA_Pmean", -1.0, 8.0, "mmHg");
        // left ventricle
        add("LV_ISV", 30.0, 66.0, "mL/m^2");
        add("LV_IEDV", 47.0, 107.0, "mL/m^2");
        add("LV_IESV", 11.0, 47.0, "mL/m^2");
        add("LV_EF", 51.0, 76.0, "%");
        add("LV_Pmax", 90.0, 140.0, "mmHg");
        add("LV_Pmin", 4.0, 12.0, "mmHg");
        // right ventricle
        add("RV_ISV", 28.0, 75.0, "mL/m^2");
        add("RV_IEDV", 53.0, 123.0, "mL/m^2");
        add("RV_IESV", 17.0, 59.0, "mL/m^2");
        add("RV_EF", 42.0, 72.0, "%");
        add("RV_Pmax", 15.0, 28.0, "mmHg");
        add("RV_Pmin", 0.0, 8.0, "mmHg");
        // global hemodynamics
        add("CI", 2.8, 4.2, "L/(min*m^2)");
        add("SAP_max", 0.0, 140.0, "mmHg");
        add("SAP_min", 0.0, 80.0, "mmHg");
        add("PAP_max", 15.0, 28.0, "mmHg");
        add("PAP_min", 5.0, 16.0, "mmHg");
        add("PAP_mean", 10.0, 22.0, "mmHg");
        add("PWP_max", 9.0, 23.0, "mmHg");
        add("PWP_min", 1.0, 12.0, "mmHg");
        add("PWP_mean", 6.0, 15.0, "mmHg");
        add("SVR", 11.3, 17.5, "mmHg*min/L");
        add("PVR", 1.9, 3.1, "mmHg*min/L");
        if variant == Variant::Capillary {
            add("S_f", 0.0, 0.05, "1/m^2");
        }
        HealthyRanges { ranges }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&HealthyRange> {
        self.ranges.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ranges.keys().map(|s| s.as_str())
    }
}

/// Position of one output relative to its healthy range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Below,
    In,
    Above,
}

/// Per-output verdicts plus the aggregate flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub verdicts: IndexMap<String, Verdict>,
    pub all_in_range: bool,
}

impl RangeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }

    /// Names of outputs that fell outside their range.
    pub fn out_of_range(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|(_, v)| **v != Verdict::In)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// Checks every ranged output of the report against its healthy interval.
pub fn range_check(report: &OutputReport, ranges: &HealthyRanges) -> Result<RangeReport> {
    let mut verdicts = IndexMap::with_capacity(ranges.len());
    let mut missing = Vec::new();
    for (name, range) in &ranges.ranges {
        match report.get(name) {
            Some(x) => {
                let verdict = if x < range.lo {
                    Verdict::Below
                } else if x > range.hi {
                    Verdict::Above
                } else {
                    Verdict::In
                };
                verdicts.insert(name.clone(), verdict);
            }
            None => missing.push(name.clone()),
        }
    }
    if verdicts.is_empty() {
        return Err(Error::Schema("report and ranges share no output names".into()));
    }
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "report lacks ranged outputs: {}",
            missing.join(", ")
        )));
    }
    let all_in_range = verdicts.values().all(|v| *v == Verdict::In);
    Ok(RangeReport { verdicts, all_in_range })
}
