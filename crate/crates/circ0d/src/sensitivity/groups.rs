//! Multi-parameter (group) sensitivity: coefficient family, scalar
//! indicators for outputs and time-dependent variables, and the group
//! campaign over ten nuances of variation per group.

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{default_initial_state, simulate, IntegrationConfig, SimulationTrace};
use crate::error::{Error, Result};
use crate::model::{Chamber, ParameterSet, VarId, Variant};
use crate::observables::{compute_outputs, pv_loop_area, BodyMetrics, OutputReport};

/// Which coefficient of the variation family applies to a group member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientKind {
    /// Resistances: 1 + 0.15 rho
    #[serde(rename = "R")]
    Resistance,
    /// Inductances: 1 + 0.075 rho
    #[serde(rename = "L")]
    Inductance,
    /// Capacitances: 1 - 0.06 rho
    #[serde(rename = "C")]
    Capacitance,
    /// Active elastance: 1 + 0.12 rho
    #[serde(rename = "a")]
    ActiveElastance,
    /// Passive elastance: 1 + 0.14 rho
    #[serde(rename = "p")]
    PassiveElastance,
    /// Resting volume: 1 - 0.05 rho
    #[serde(rename = "0")]
    RestingVolume,
}

/// Multiplier applied to a parameter of the given kind at nuance rho.
pub fn group_coefficients(kind: CoefficientKind, rho: i32) -> Result<f64> {
    if rho == 0 || rho.abs() > 5 {
        return Err(Error::Domain(format!(
            "nuance rho must be a nonzero integer with |rho| <= 5, got {rho}"
        )));
    }
    let rho = rho as f64;
    Ok(match kind {
        CoefficientKind::Resistance => 1.0 + 0.15 * rho,
        CoefficientKind::Inductance => 1.0 + 0.075 * rho,
        CoefficientKind::Capacitance => 1.0 - 0.06 * rho,
        CoefficientKind::ActiveElastance => 1.0 + 0.12 * rho,
        CoefficientKind::PassiveElastance => 1.0 + 0.14 * rho,
        CoefficientKind::RestingVolume => 1.0 - 0.05 * rho,
    })
}

/// The ten admissible nuances, negative side first.
pub const NUANCES: [i32; 10] = [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5];

/// A named group of parameters varied together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    /// (parameter path, coefficient kind) per member.
    pub members: Vec<(String, CoefficientKind)>,
}

impl GroupSpec {
    /// Scales every member by its kind's coefficient at nuance rho.
    pub fn apply(&self, base: &ParameterSet, rho: i32) -> Result<ParameterSet> {
        if self.members.is_empty() {
            return Err(Error::Domain(format!("group `{}` has no members", self.name)));
        }
        let mut out = base.clone();
        for (path, kind) in &self.members {
            out.scale_path(path, group_coefficients(*kind, rho)?)?;
        }
        Ok(out)
    }
}

/// The built-in groups: four vascular RLC districts and the left-ventricle
/// elastances/resting volume; variant C adds the two capillary districts
/// (the pulmonary one includes the shunt).
pub fn builtin_groups(variant: Variant) -> Vec<GroupSpec> {
    use CoefficientKind::*;
    let rlc = |name: &str, side: &str, pos: &str| GroupSpec {
        name: name.to_string(),
        members: vec![
            (format!("circ.{side}.{pos}.R"), Resistance),
            (format!("circ.{side}.{pos}.L"), Inductance),
            (format!("circ.{side}.{pos}.C"), Capacitance),
        ],
    };
    let mut groups = vec![
        rlc("systemic_arterial", "SYS", "AR"),
        rlc("systemic_venous", "SYS", "VEN"),
        rlc("pulmonary_arterial", "PUL", "AR"),
        rlc("pulmonary_venous", "PUL", "VEN"),
        GroupSpec {
            name: "left_ventricle".to_string(),
            members: vec![
                ("chambers.LV.Ea".to_string(), ActiveElastance),
                ("chambers.LV.Ep".to_string(), PassiveElastance),
                ("chambers.LV.V0".to_string(), RestingVolume),
            ],
        },
    ];
    if variant == Variant::Capillary {
        groups.push(GroupSpec {
            name: "systemic_capillary".to_string(),
            members: vec![
                ("capillary.R_C_SYS".to_string(), Resistance),
                ("capillary.C_C_SYS".to_string(), Capacitance),
            ],
        });
        groups.push(GroupSpec {
            name: "pulmonary_capillary".to_string(),
            members: vec![
                ("capillary.R_C_PUL".to_string(), Resistance),
                ("capillary.C_C_PUL".to_string(), Capacitance),
                ("capillary.R_SH".to_string(), Resistance),
                ("capillary.C_SH".to_string(), Capacitance),
            ],
        });
    }
    groups
}

/// All scalar indicators of one modified run against the reference run:
/// one Gamma per output, four Gammas per time-dependent variable, and the
/// four PV-loop area ratios. 129 indicators for NC, 150 for C.
/// Indicators whose reference denominator vanishes are None.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSet {
    /// Gamma(zeta) = (mod/ref - 1) * 100 per output.
    pub outputs: IndexMap<String, Option<f64>>,
    /// Per variable: [Gamma_T, Gamma_mean, Gamma_max, Gamma_min].
    pub variables: IndexMap<String, [Option<f64>; 4]>,
    /// PV-loop area ratios for LA, LV, RA, RV.
    pub pv_ratios: IndexMap<String, Option<f64>>,
}

impl IndicatorSet {
    pub fn count(&self) -> usize {
        self.outputs.len() + 4 * self.variables.len() + self.pv_ratios.len()
    }
}

fn ratio_indicator(modified: f64, reference: f64) -> Option<f64> {
    if reference == 0.0 {
        None
    } else {
        Some((modified / reference - 1.0) * 100.0)
    }
}

/// Trapezoidal integral over the uniform window.
fn trapezoid_integral(samples: &[f64], dt: f64) -> f64 {
    let n = samples.len();
    (0.5 * (samples[0] + samples[n - 1]) + samples[1..n - 1].iter().sum::<f64>()) * dt
}

/// Computes the indicator family from matched last-beat traces and reports.
pub fn indicators(
    ref_trace: &SimulationTrace,
    mod_trace: &SimulationTrace,
    ref_report: &OutputReport,
    mod_report: &OutputReport,
) -> Result<IndicatorSet> {
    if ref_trace.variant != mod_trace.variant {
        return Err(Error::VariantMismatch("indicator traces mix variants".into()));
    }
    if ref_trace.len() != mod_trace.len() || (ref_trace.dt - mod_trace.dt).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!(
            "traces have {} vs {} nodes at dt {} vs {}",
            ref_trace.len(),
            mod_trace.len(),
            ref_trace.dt,
            mod_trace.dt
        )));
    }

    let mut outputs = IndexMap::with_capacity(ref_report.len());
    for (name, ref_value) in ref_report.iter() {
        let mod_value = mod_report
            .get(name)
            .ok_or_else(|| Error::Schema(format!("modified report lacks `{name}`")))?;
        outputs.insert(name.to_string(), ratio_indicator(mod_value, ref_value));
    }

    let dt = ref_trace.dt;
    let mut variables = IndexMap::new();
    for var in VarId::all(ref_trace.variant) {
        let r = ref_trace.series(var);
        let m = mod_trace.series(var);
        let int_r = trapezoid_integral(&r, dt);
        let int_m = trapezoid_integral(&m, dt);
        let gamma_t = if int_r == 0.0 { None } else { Some((int_m - int_r) / int_r * 100.0) };
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let gamma_mean = ratio_indicator(mean(&m), mean(&r));
        let max = |x: &[f64]| x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = |x: &[f64]| x.iter().copied().fold(f64::INFINITY, f64::min);
        let gamma_max = ratio_indicator(max(&m), max(&r));
        let gamma_min = ratio_indicator(min(&m), min(&r));
        variables.insert(var.name().to_string(), [gamma_t, gamma_mean, gamma_max, gamma_min]);
    }

    let mut pv_ratios = IndexMap::with_capacity(4);
    for chamber in Chamber::ALL {
        let ref_area = pv_loop_area(ref_trace, chamber)?;
        let mod_area = pv_loop_area(mod_trace, chamber)?;
        let ratio = if ref_area == 0.0 { None } else { Some(mod_area / ref_area) };
        pv_ratios.insert(chamber.label().to_string(), ratio);
    }

    Ok(IndicatorSet { outputs, variables, pv_ratios })
}

/// One campaign row: a group at one nuance.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignRow {
    pub group: String,
    pub rho: i32,
    pub converged: bool,
    pub indicators: IndicatorSet,
}

/// Runs every group over the ten nuances against the unmodified baseline.
pub fn group_campaign(
    base: &ParameterSet,
    groups: &[GroupSpec],
    cfg: &IntegrationConfig,
    body: &BodyMetrics,
) -> Result<Vec<CampaignRow>> {
    let ref_trace = simulate(base, &default_initial_state(base), cfg)?.last_beat()?;
    let ref_report = compute_outputs(&ref_trace, base, body)?;

    let jobs: Vec<(usize, i32)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, _)| NUANCES.iter().map(move |rho| (g, *rho)))
        .collect();
    let rows: Result<Vec<CampaignRow>> = jobs
        .par_iter()
        .map(|(g, rho)| {
            let group = &groups[*g];
            let params = group.apply(base, *rho)?;
            let trace = simulate(&params, &default_initial_state(&params), cfg)?.last_beat()?;
            let report = compute_outputs(&trace, &params, body)?;
            let ind = indicators(&ref_trace, &trace, &ref_report, &report)?;
            Ok(CampaignRow {
                group: group.name.clone(),
                rho: *rho,
                converged: trace.converged,
                indicators: ind,
            })
        })
        .collect();
    rows
}
