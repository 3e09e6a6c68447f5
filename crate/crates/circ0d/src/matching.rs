//! Greedy cross-model parameter matching: tune one variant's parameters so
//! its last-beat trace mimics the other variant's.
//!
//! Each parameter is repeatedly multiplied by a factor near 1; a step is
//! kept only if the trace error strictly decreases. The factor schedule
//! alternates above and below 1 so parameters can move either way.

use serde::{Deserialize, Serialize};

use crate::engine::{simulate, IntegrationConfig, SimulationTrace};
use crate::error::{Error, Result};
use crate::model::{ParameterSet, VarId, Variant};

/// Configuration of the matching run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchConfig {
    /// Inner repetitions n per parameter and factor.
    pub inner_repetitions: usize,
    /// Factor schedule; each entry runs one full sweep over the tunables.
    pub factor_schedule: Vec<f64>,
    /// Matching stops once the error falls below this.
    pub strict_threshold: f64,
    /// Crossing this is recorded as an acceptable solution.
    pub acceptable_threshold: f64,
    /// Variables entering the error; defaults to the 20 shared variables.
    pub variables: Vec<VarId>,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            inner_repetitions: 10,
            factor_schedule: vec![1.05, 0.95, 1.02, 0.98, 1.01, 0.99],
            strict_threshold: 0.92,
            acceptable_threshold: 1.5,
            variables: VarId::shared(),
        }
    }
}

impl MatchConfig {
    fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::Domain("matching variable set is empty".into()));
        }
        if self.factor_schedule.iter().any(|k| !(*k > 0.0) || *k == 1.0) {
            return Err(Error::Domain("factors must be positive and != 1".into()));
        }
        if !(self.strict_threshold > 0.0 && self.acceptable_threshold > 0.0) {
            return Err(Error::Domain("thresholds must be positive".into()));
        }
        Ok(())
    }
}

fn trapezoid_integral(samples: &[f64], dt: f64) -> f64 {
    let n = samples.len();
    (0.5 * (samples[0] + samples[n - 1]) + samples[1..n - 1].iter().sum::<f64>()) * dt
}

/// Trace distance: for each variable, the integral of the absolute
/// difference over the last beat, normalized by log(2 + mean |reference|).
///
/// `trace_b` plays the reference role in the normalization.
pub fn match_error(
    trace_a: &SimulationTrace,
    trace_b: &SimulationTrace,
    variables: &[VarId],
) -> Result<f64> {
    if trace_a.len() != trace_b.len() || (trace_a.dt - trace_b.dt).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!(
            "traces disagree: {} nodes at dt {} vs {} nodes at dt {}",
            trace_a.len(),
            trace_a.dt,
            trace_b.len(),
            trace_b.dt
        )));
    }
    let dt = trace_a.dt;
    let t_hb = trace_a.t_hb;
    let mut error = 0.0;
    for var in variables {
        let a = trace_a.series(*var);
        let b = trace_b.series(*var);
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
        let delta = trapezoid_integral(&diff, dt);
        let abs_b: Vec<f64> = b.iter().map(|y| y.abs()).collect();
        let mean_b = trapezoid_integral(&abs_b, dt) / t_hb;
        error += delta / (2.0 + mean_b).ln();
    }
    Ok(error)
}

/// One recorded trial step of the matching run.
#[derive(Debug, Clone, Serialize)]
pub struct MatchStep {
    pub iteration: usize,
    pub parameter: String,
    pub factor: f64,
    pub error: f64,
    pub accepted: bool,
    /// Set when the trial simulation diverged (step counted as rejected).
    pub diverged: bool,
}

/// Outcome of a matching run.
#[derive(Debug, Clone, Serialize)]
pub struct MatchOutcome {
    pub matched: ParameterSet,
    /// Error before any step.
    pub initial_error: f64,
    pub final_error: f64,
    /// Full trial trajectory, accepted steps marked.
    pub trajectory: Vec<MatchStep>,
    /// First accepted-step index at which the error was below the
    /// acceptable / strict threshold, if reached.
    pub acceptable_at: Option<usize>,
    pub strict_at: Option<usize>,
}

impl MatchOutcome {
    /// The errors of the accepted steps, prefixed by the initial error.
    pub fn accepted_errors(&self) -> Vec<f64> {
        let mut out = vec![self.initial_error];
        out.extend(self.trajectory.iter().filter(|s| s.accepted).map(|s| s.error));
        out
    }
}

/// A starting point for the mutable variant that shares the reference's
/// chamber, valve and RLC values; switching to the capillary variant adds
/// the reference capillary parameter table.
pub fn shared_start(reference: &ParameterSet, mutable_variant: Variant) -> ParameterSet {
    let mut out = reference.clone();
    out.variant = mutable_variant;
    out.capillary = match mutable_variant {
        Variant::Capillary => out
            .capillary
            .or_else(|| ParameterSet::healthy(Variant::Capillary).capillary),
        Variant::NonCapillary => None,
    };
    out
}

/// Parameter paths tuned by the matching run: everything except heart rate
/// and cycle timings, so both traces share the beat period and grid.
pub fn tunable_paths(variant: Variant) -> Vec<String> {
    let mut paths = Vec::new();
    for chamber in ["LA", "LV", "RA", "RV"] {
        for field in ["Ea", "Ep", "V0"] {
            paths.push(format!("chambers.{chamber}.{field}"));
        }
    }
    for valve in ["MV", "AV", "TV", "PV"] {
        for field in ["Rmin", "Rmax"] {
            paths.push(format!("valves.{valve}.{field}"));
        }
    }
    for side in ["SYS", "PUL"] {
        for pos in ["AR", "VEN"] {
            for field in ["R", "L", "C"] {
                paths.push(format!("circ.{side}.{pos}.{field}"));
            }
        }
    }
    if variant == Variant::Capillary {
        for field in ["R_C_SYS", "C_C_SYS", "R_C_PUL", "C_C_PUL", "R_SH", "C_SH"] {
            paths.push(format!("capillary.{field}"));
        }
    }
    paths
}

/// Runs the matching algorithm: `mutable` is tuned until its trace mimics
/// the fixed `reference` trace. Works in either direction (the reference
/// may come from either variant).
pub fn match_models(
    reference: &SimulationTrace,
    mutable: &ParameterSet,
    mutable_init: &crate::model::StateVector,
    cfg: &MatchConfig,
    sim: &IntegrationConfig,
) -> Result<MatchOutcome> {
    cfg.validate()?;
    let run = |params: &ParameterSet| -> Result<SimulationTrace> {
        simulate(params, mutable_init, sim)?.last_beat()
    };

    let mut incumbent = mutable.clone();
    let trace = run(&incumbent)?;
    let mut error = match_error(&trace, reference, &cfg.variables)?;
    let initial_error = error;

    let paths = tunable_paths(mutable.variant);
    let mut trajectory = Vec::new();
    let mut accepted_count = 0usize;
    let mut acceptable_at = if error < cfg.acceptable_threshold { Some(0) } else { None };
    let mut strict_at = if error < cfg.strict_threshold { Some(0) } else { None };
    let mut iteration = 0usize;

    'outer: for &factor in &cfg.factor_schedule {
        for path in &paths {
            for _ in 0..cfg.inner_repetitions {
                iteration += 1;
                let mut trial = incumbent.clone();
                trial.scale_path(path, factor)?;
                let (trial_error, diverged) = match run(&trial) {
                    Ok(t) => (match_error(&t, reference, &cfg.variables)?, false),
                    Err(Error::Diverged { .. }) => (f64::INFINITY, true),
                    Err(e) => return Err(e),
                };
                let accepted = trial_error < error;
                trajectory.push(MatchStep {
                    iteration,
                    parameter: path.clone(),
                    factor,
                    error: if diverged { f64::NAN } else { trial_error },
                    accepted,
                    diverged,
                });
                if !accepted {
                    break; // next parameter
                }
                incumbent = trial;
                error = trial_error;
                accepted_count += 1;
                if acceptable_at.is_none() && error < cfg.acceptable_threshold {
                    acceptable_at = Some(accepted_count);
                }
                if strict_at.is_none() && error < cfg.strict_threshold {
                    strict_at = Some(accepted_count);
                }
                if error < cfg.strict_threshold {
                    break 'outer;
                }
            }
        }
    }

    Ok(MatchOutcome {
        matched: incumbent,
        initial_error,
        final_error: error,
        trajectory,
        acceptable_at,
        strict_at,
    })
}
