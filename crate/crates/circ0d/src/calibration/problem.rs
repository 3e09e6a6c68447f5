//! Calibration problems: targets, loss evaluation through the simulator,
//! and the bounded quasi-Newton driver.

use serde::{Deserialize, Serialize};

use crate::engine::{default_initial_state, simulate, IntegrationConfig};
use crate::error::{Error, Result};
use crate::model::{ParameterSet, Variant};
use crate::observables::{compute_outputs, BodyMetrics, HealthyRanges, OutputReport};

use super::lbfgsb::{minimize_bounded, OptimOptions};
use super::loss::{loss_transform, residual, LossId};

/// Penalty loss assigned to diverged simulations; large enough to dominate
/// any finite residual loss (f_5 at delta ~ 50 reaches ~1e20).
pub const DIVERGENCE_PENALTY: f64 = 1e30;

/// One calibration target: an output name and its desired value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unit: Option<String>,
}

/// The target data set d_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetData {
    pub entries: Vec<TargetEntry>,
}

impl TargetData {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Extracts targets from a report, keeping the named outputs in order.
    pub fn from_report(report: &OutputReport, names: &[String]) -> Result<Self> {
        let mut entries = Vec::with_capacity(names.len());
        for name in names {
            let value = report
                .get(name)
                .ok_or_else(|| Error::Schema(format!("report lacks target output `{name}`")))?;
            entries.push(TargetEntry { name: name.clone(), value, unit: None });
        }
        Ok(TargetData { entries })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("targets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("targets: {e}")))
    }
}

/// The output names used as calibration targets for a model variant: the
/// published-range outputs the variant can produce (stroke work and the
/// valve gradient are excluded, as is the shunt fraction for variant NC).
pub fn calibration_target_names(variant: Variant) -> Vec<String> {
    HealthyRanges::builtin(variant).names().map(str::to_string).collect()
}

/// A bounded calibration problem over named free parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationProblem {
    /// Paths of the parameters being optimized.
    pub free_parameters: Vec<String>,
    /// Per-parameter closed bounds, aligned with `free_parameters`.
    pub bounds: Vec<(f64, f64)>,
    /// Starting parameter set (also carries every fixed parameter).
    pub initial: ParameterSet,
    pub targets: TargetData,
    pub loss: LossId,
    /// Loss value below which the calibration counts as successful.
    pub success_threshold: f64,
    pub sim: IntegrationConfig,
    pub body: BodyMetrics,
    pub max_iterations: usize,
}

impl CalibrationProblem {
    /// Builds a problem with the default bounds: each free parameter may
    /// move within [1/3, 5/3] of its initial value (the sensitivity
    /// hypercube), threshold 1e-3, 500 iterations.
    pub fn new(
        initial: ParameterSet,
        free_parameters: Vec<String>,
        targets: TargetData,
        loss: LossId,
    ) -> Result<Self> {
        let mut bounds = Vec::with_capacity(free_parameters.len());
        for path in &free_parameters {
            let x = initial.get_path(path)?;
            bounds.push((x / 3.0, 5.0 * x / 3.0));
        }
        let sim = IntegrationConfig::default_for(initial.variant);
        let body = BodyMetrics::default_for(initial.variant);
        Ok(CalibrationProblem {
            free_parameters,
            bounds,
            initial,
            targets,
            loss,
            success_threshold: 1e-3,
            sim,
            body,
            max_iterations: 500,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.free_parameters.len() != self.bounds.len() {
            return Err(Error::Domain("bounds must align with free parameters".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Domain("no calibration targets".into()));
        }
        for (path, (lo, hi)) in self.free_parameters.iter().zip(&self.bounds) {
            let x = self.initial.get_path(path)?;
            if !(lo <= hi && *lo <= x && x <= *hi) {
                return Err(Error::Domain(format!(
                    "initial value {x} of `{path}` outside bounds [{lo}, {hi}]"
                )));
            }
        }
        for t in &self.targets.entries {
            if t.value == 0.0 {
                return Err(Error::ZeroTarget(t.name.clone()));
            }
            if !t.value.is_finite() {
                return Err(Error::Domain(format!("target `{}` is not finite", t.name)));
            }
        }
        Ok(())
    }

    /// The parameter set at a point of the free-parameter space.
    pub fn materialize(&self, x: &[f64]) -> Result<ParameterSet> {
        let mut params = self.initial.clone();
        for (path, value) in self.free_parameters.iter().zip(x) {
            params.set_path(path, *value)?;
        }
        Ok(params)
    }
}

/// Loss, total deviation and report at one parameter set.
///
/// A diverged simulation yields the penalty pair and no report, keeping
/// the optimizer's objective total.
pub fn evaluate_loss(
    problem: &CalibrationProblem,
    params: &ParameterSet,
) -> Result<(f64, f64, Option<OutputReport>)> {
    let trace = match simulate(params, &default_initial_state(params), &problem.sim) {
        Ok(t) => t,
        Err(Error::Diverged { .. }) => return Ok((DIVERGENCE_PENALTY, DIVERGENCE_PENALTY, None)),
        Err(e) => return Err(e),
    };
    let report = compute_outputs(&trace.last_beat()?, params, &problem.body)?;
    let mut loss = 0.0;
    let mut deviation = 0.0;
    for t in &problem.targets.entries {
        let q = report
            .get(&t.name)
            .ok_or_else(|| Error::Schema(format!("model lacks target output `{}`", t.name)))?;
        let delta = residual(q, t.value).map_err(|_| Error::ZeroTarget(t.name.clone()))?;
        deviation += delta;
        loss += loss_transform(problem.loss, delta);
    }
    Ok((loss, deviation, Some(report)))
}

/// Result of one bounded calibration.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationResult {
    pub fitted: ParameterSet,
    pub final_loss: f64,
    /// Total parameter deviation (sum of relative residuals) at the fit.
    pub total_deviation: f64,
    pub wall_time_s: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub success: bool,
}

/// Runs the bounded limited-memory quasi-Newton minimization.
///
/// The search happens in bound-normalized coordinates; gradients are
/// forward finite differences. Stops on loss < threshold, a small
/// projected gradient, a stalled line search, or the iteration budget; an
/// unsuccessful stop still returns the best point found.
pub fn calibrate(problem: &CalibrationProblem) -> Result<CalibrationResult> {
    problem.validate()?;
    let start = std::time::Instant::now();
    let n = problem.free_parameters.len();
    let spans: Vec<f64> = problem.bounds.iter().map(|(lo, hi)| hi - lo).collect();
    let to_params = |z: &[f64]| -> Vec<f64> {
        (0..n).map(|i| problem.bounds[i].0 + z[i] * spans[i]).collect()
    };
    let objective = |z: &[f64]| -> f64 {
        let x = to_params(z);
        match problem.materialize(&x).and_then(|p| evaluate_loss(problem, &p)) {
            Ok((loss, _, _)) => loss,
            Err(_) => DIVERGENCE_PENALTY,
        }
    };
    let z0: Vec<f64> = (0..n)
        .map(|i| {
            let x = problem.initial.get_path(&problem.free_parameters[i]).expect("validated");
            (x - problem.bounds[i].0) / spans[i]
        })
        .collect();
    let opts = OptimOptions {
        max_iterations: problem.max_iterations,
        target_value: Some(problem.success_threshold),
        ..OptimOptions::default()
    };
    let outcome = minimize_bounded(objective, &z0, &vec![0.0; n], &vec![1.0; n], &opts);

    let fitted = problem.materialize(&to_params(&outcome.x))?;
    let (final_loss, total_deviation, _) = evaluate_loss(problem, &fitted)?;
    let success = final_loss < problem.success_threshold;
    Ok(CalibrationResult {
        fitted,
        final_loss,
        total_deviation,
        wall_time_s: start.elapsed().as_secs_f64(),
        iterations: outcome.iterations,
        evaluations: outcome.evaluations + 1,
        success,
    })
}
