//! Loss-function comparison study and the two-stage 0D calibration
//! workflow (capillary model generates targets, non-capillary model is
//! calibrated against them).

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{default_initial_state, simulate, IntegrationConfig};
use crate::error::Result;
use crate::model::{ParameterSet, Variant};
use crate::observables::{compute_outputs, BodyMetrics};
use crate::scenarios::{builtin, Condition, Severity};

use super::loss::LossId;
use super::problem::{
    calibrate, calibration_target_names, CalibrationProblem, CalibrationResult, TargetData,
};

/// Left-ventricle parameters frozen by the workflow (the downstream stage
/// replaces the 0D left ventricle wholesale).
pub const LV_FROZEN_PATHS: [&str; 3] = ["chambers.LV.Ea", "chambers.LV.Ep", "chambers.LV.V0"];

/// Simulates the capillary model under a scenario and extracts the
/// time-independent target set for calibrating the non-capillary model.
pub fn scenario_targets(
    base_c: &ParameterSet,
    condition: Condition,
    severity: Severity,
    sim: &IntegrationConfig,
    body: &BodyMetrics,
) -> Result<TargetData> {
    let scenario = builtin(condition, severity);
    let params = scenario.apply(base_c)?;
    let trace = simulate(&params, &default_initial_state(&params), sim)?.last_beat()?;
    let report = compute_outputs(&trace, &params, body)?;
    // targets restricted to what the NC model can reproduce
    TargetData::from_report(&report, &calibration_target_names(Variant::NonCapillary))
}

/// One row of the loss-function study table.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub condition: Condition,
    pub severity: Severity,
    pub loss: LossId,
    pub wall_time_s: f64,
    pub total_deviation: f64,
    pub final_loss: f64,
    pub success: bool,
    pub iterations: usize,
}

/// Settings shared by the study and workflow drivers.
#[derive(Debug, Clone)]
pub struct StudySetup {
    pub base_c: ParameterSet,
    pub base_nc: ParameterSet,
    /// Free parameter paths of the NC calibration.
    pub free_parameters: Vec<String>,
    pub sim_c: IntegrationConfig,
    pub sim_nc: IntegrationConfig,
    pub body_c: BodyMetrics,
    pub body_nc: BodyMetrics,
    pub max_iterations: usize,
}

impl StudySetup {
    pub fn healthy(free_parameters: Vec<String>) -> Self {
        StudySetup {
            base_c: ParameterSet::healthy(Variant::Capillary),
            base_nc: ParameterSet::healthy(Variant::NonCapillary),
            free_parameters,
            sim_c: IntegrationConfig::default_for(Variant::Capillary),
            sim_nc: IntegrationConfig::default_for(Variant::NonCapillary),
            body_c: BodyMetrics::default_for(Variant::Capillary),
            body_nc: BodyMetrics::default_for(Variant::NonCapillary),
            max_iterations: 500,
        }
    }

    fn problem(
        &self,
        targets: TargetData,
        loss: LossId,
        free: Vec<String>,
    ) -> Result<CalibrationProblem> {
        let mut problem = CalibrationProblem::new(self.base_nc.clone(), free, targets, loss)?;
        problem.sim = self.sim_nc;
        problem.body = self.body_nc;
        problem.max_iterations = self.max_iterations;
        Ok(problem)
    }
}

/// Runs the full loss-function comparison: for each case the capillary
/// model provides targets and the non-capillary model is calibrated once
/// per loss id; rows report time and total deviation.
pub fn loss_study(
    setup: &StudySetup,
    cases: &[(Condition, Severity)],
    losses: &[LossId],
) -> Result<Vec<StudyRow>> {
    // target sets are independent across cases
    let targets: Result<Vec<TargetData>> = cases
        .par_iter()
        .map(|(condition, severity)| {
            scenario_targets(&setup.base_c, *condition, *severity, &setup.sim_c, &setup.body_c)
        })
        .collect();
    let targets = targets?;

    let jobs: Vec<(usize, LossId)> = (0..cases.len())
        .flat_map(|i| losses.iter().map(move |l| (i, *l)))
        .collect();
    let rows: Result<Vec<StudyRow>> = jobs
        .par_iter()
        .map(|(i, loss)| {
            let (condition, severity) = cases[*i];
            let problem =
                setup.problem(targets[*i].clone(), *loss, setup.free_parameters.clone())?;
            let result = calibrate(&problem)?;
            Ok(StudyRow {
                condition,
                severity,
                loss: *loss,
                wall_time_s: result.wall_time_s,
                total_deviation: result.total_deviation,
                final_loss: result.final_loss,
                success: result.success,
                iterations: result.iterations,
            })
        })
        .collect();
    rows
}

/// The 0D stages of the cross-model workflow: scenario -> capillary run ->
/// targets -> calibrate the non-capillary model with the left-ventricle
/// parameters frozen. Returns the targets and the calibration result whose
/// LV parameters are bitwise those of the baseline.
pub fn workflow_0d(
    setup: &StudySetup,
    condition: Condition,
    severity: Severity,
    loss: LossId,
) -> Result<(TargetData, CalibrationResult)> {
    let targets =
        scenario_targets(&setup.base_c, condition, severity, &setup.sim_c, &setup.body_c)?;
    let free: Vec<String> = setup
        .free_parameters
        .iter()
        .filter(|p| !LV_FROZEN_PATHS.contains(&p.as_str()))
        .cloned()
        .collect();
    let problem = setup.problem(targets.clone(), loss, free)?;
    let result = calibrate(&problem)?;
    Ok((targets, result))
}
