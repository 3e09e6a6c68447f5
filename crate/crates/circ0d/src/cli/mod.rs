//! Command-line front end binding the simulator, scenarios, sensitivity,
//! calibration and matching into batch pipelines.

mod artifacts;
mod plots;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::calibration::{
    calibrate, calibration_target_names, loss_study, workflow_0d, CalibrationProblem, LossId,
    StudySetup, TargetData,
};
use crate::engine::{default_initial_state, simulate, IntegrationConfig, SimulationTrace};
use crate::error::Error;
use crate::matching::{match_models, tunable_paths, MatchConfig};
use crate::model::{ParameterSet, ValveLaw, VarId, Variant};
use crate::observables::{compute_outputs, range_check, BodyMetrics, HealthyRanges};
use crate::scenarios::{builtin, Condition, Severity};
use crate::sensitivity::{
    builtin_groups, group_campaign, relevant_parameters, saltelli_design, total_indices,
};

pub use artifacts::{
    campaign_csv, output_root, parse_trace_csv, sobol_csv, study_csv, trace_csv, trajectory_csv,
    RunDir, RunManifest,
};

/// Exit codes; usage errors exit with clap's code 2.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_CALIBRATION_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "circ0d", version, about = "Closed-loop 0D cardiocirculatory simulator")]
pub struct Cli {
    /// Worker threads for parallel campaigns (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Output directory (defaults to $CIRC0D_OUT/<command> or runs/<command>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Model variant (NC or C).
    #[arg(long)]
    pub variant: Variant,
    /// Parameter document; defaults to the built-in healthy set.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Timestep in seconds (default 1e-3 for NC, 1e-4 for C).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Limit-cycle residual tolerance.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Beat budget.
    #[arg(long, default_value_t = 300)]
    pub max_beats: usize,
    /// Beats retained in the trace.
    #[arg(long, default_value_t = 1)]
    pub keep: usize,
    /// Run exactly this many beats instead of stopping at convergence.
    #[arg(long)]
    pub exact_beats: Option<usize>,
    /// Logistic valve smoothing steepness (1/mmHg); hard switch if absent.
    #[arg(long)]
    pub valve_smoothing: Option<f64>,
    /// Body surface area in m^2 (defaults to the per-variant pinned value).
    #[arg(long)]
    pub bsa: Option<f64>,
    /// Emit SVG panels of the PV loops and main time series.
    #[arg(long)]
    pub svg: bool,
}

impl SimArgs {
    fn load_params(&self) -> Result<ParameterSet, Error> {
        let params = match &self.params {
            Some(path) => ParameterSet::from_toml(&std::fs::read_to_string(path)?)?,
            None => ParameterSet::healthy(self.variant),
        };
        if params.variant != self.variant {
            return Err(Error::VariantMismatch(format!(
                "document is variant {} but --variant {} was requested",
                params.variant, self.variant
            )));
        }
        Ok(params)
    }

    fn config(&self, variant: Variant) -> IntegrationConfig {
        let mut cfg = IntegrationConfig::default_for(variant);
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        cfg.convergence_tol = self.tol;
        cfg.max_heartbeats = self.max_beats;
        cfg.heartbeats_to_keep = self.keep;
        cfg.exact_heartbeats = self.exact_beats;
        if let Some(steepness) = self.valve_smoothing {
            cfg.valve_law = ValveLaw::Smooth { steepness };
        }
        cfg
    }

    fn body(&self, variant: Variant) -> BodyMetrics {
        self.bsa.map(|bsa| BodyMetrics { bsa }).unwrap_or_else(|| BodyMetrics::default_for(variant))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate to the limit cycle; write trace, outputs and verdicts.
    Simulate(SimArgs),
    /// Apply a built-in hypertension scenario, then simulate.
    Scenario {
        condition: Condition,
        severity: Severity,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Saltelli campaign of total Sobol indices over the analysis space.
    Sobol {
        #[command(flatten)]
        sim: SimArgs,
        /// Base sample count N (power of two).
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Threshold for the relevant-parameter set.
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
    },
    /// Group sensitivity campaign (ten nuances per group).
    Groups {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Calibrate the NC model against a target file.
    Calibrate {
        #[command(flatten)]
        sim: SimArgs,
        /// Target JSON produced by `simulate`/`workflow` or hand-written.
        #[arg(long)]
        targets: PathBuf,
        /// Free parameter paths (comma separated); defaults to the cached
        /// relevant set of the healthy NC baseline.
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        /// Residual transform id 0..=8.
        #[arg(long, default_value_t = 1)]
        loss: u8,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Success threshold on the loss.
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
    /// Calibration-time and deviation study over the nine hypertension
    /// cases and the requested loss functions.
    Lossstudy {
        /// Loss ids, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = (0..=8u8).collect::<Vec<u8>>())]
        losses: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
    /// Match one variant's parameters so its trace mimics the other's.
    Match {
        /// Reference variant (its healthy trace is the target).
        #[arg(long, default_value = "NC")]
        reference: Variant,
        /// Mutable variant whose parameters are tuned.
        #[arg(long, default_value = "C")]
        mutable: Variant,
        /// Inner repetitions per parameter and factor.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Factor schedule.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.05, 0.95, 1.02, 0.98, 1.01, 0.99])]
        factors: Vec<f64>,
        #[arg(long, default_value_t = 0.92)]
        strict: f64,
        #[arg(long, default_value_t = 1.5)]
        acceptable: f64,
    },
    /// Scenario -> capillary targets -> calibrate NC with LV frozen.
    Workflow {
        condition: Condition,
        severity: Severity,
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Residual transform id.
        #[arg(long, default_value_t = 1)]
        loss: u8,
    },
    /// Recompute outputs and verdicts from an existing trace CSV.
    Report {
        /// Parameter document matching the trace.
        #[arg(long)]
        params: PathBuf,
        /// Trace CSV produced by `simulate`.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        bsa: Option<f64>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if cli.jobs > 0 {
        // a failed build just means a pool already exists (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(Error::Diverged { variable, time }) => {
            eprintln!("error: simulation diverged: {variable} became non-finite at t = {time:.6} s");
            EXIT_DIVERGED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn run_dir(cli_out: &Option<PathBuf>, command: &str) -> Result<RunDir, Error> {
    let dir = cli_out.clone().unwrap_or_else(|| output_root().join(command));
    RunDir::create(dir, command)
}

fn simulate_and_write(
    run: &mut RunDir,
    params: &ParameterSet,
    sim: &SimArgs,
) -> Result<SimulationTrace, Error> {
    let cfg = sim.config(params.variant);
    let trace = simulate(params, &default_initial_state(params), &cfg)?;
    let last = trace.last_beat()?;
    let report = compute_outputs(&last, params, &sim.body(params.variant))?;
    let ranges = HealthyRanges::builtin(params.variant);
    let verdicts = range_check(&report, &ranges)?;
    run.write("trace.csv", &trace_csv(&trace))?;
    run.write("report.json", &report.to_json())?;
    run.write("verdicts.json", &verdicts.to_json())?;
    if sim.svg {
        for chamber in crate::model::Chamber::ALL {
            run.write(
                &format!("pv_{}.svg", chamber.label().to_lowercase()),
                &plots::pv_loop_svg(&last, chamber),
            )?;
        }
        for name in ["p_AR_SYS", "p_AR_PUL", "Q_AV", "Q_PV", "p_LV", "V_LV"] {
            let var = VarId::by_name(params.variant, name)?;
            run.write(&format!("ts_{name}.svg"), &plots::series_svg(&last, var))?;
        }
    }
    println!(
        "variant {}: converged={} beats={} residual={:.3e} outputs={} all_in_range={}",
        params.variant,
        trace.converged,
        trace.beats_simulated,
        trace.residual,
        report.len(),
        verdicts.all_in_range
    );
    Ok(trace)
}

/// The cached (or freshly computed) relevant-parameter set of the healthy
/// NC baseline at threshold 0.2, used as the default free set.
fn default_free_parameters(out_root: &std::path::Path) -> Result<Vec<String>, Error> {
    let cache = out_root.join("cache").join("relevant_nc.json");
    if let Ok(text) = std::fs::read_to_string(&cache) {
        if let Ok(free) = serde_json::from_str::<Vec<String>>(&text) {
            if !free.is_empty() {
                return Ok(free);
            }
        }
    }
    eprintln!("computing the relevant-parameter set (desk-scale Saltelli, N = 256) ...");
    let reference = ParameterSet::healthy(Variant::NonCapillary);
    let names = ParameterSet::analysis_paths(Variant::NonCapillary);
    let design = saltelli_design(&reference, &names, 256)?;
    let outputs = calibration_target_names(Variant::NonCapillary);
    let cfg = IntegrationConfig::default_for(Variant::NonCapillary);
    let body = BodyMetrics::default_for(Variant::NonCapillary);
    let result = total_indices(&design, &outputs, |row| {
        let mut p = reference.clone();
        for (name, value) in design.names.iter().zip(row) {
            p.set_path(name, *value).ok()?;
        }
        let trace = simulate(&p, &default_initial_state(&p), &cfg).ok()?;
        let report = compute_outputs(&trace.last_beat().ok()?, &p, &body).ok()?;
        Some(outputs.iter().map(|name| report.get(name).unwrap_or(f64::NAN)).collect())
    })?;
    let free = relevant_parameters(&result, 0.2)?;
    std::fs::create_dir_all(cache.parent().unwrap())?;
    std::fs::write(&cache, serde_json::to_string_pretty(&free).expect("serializes"))?;
    Ok(free)
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Simulate(sim) => {
            let params = sim.load_params()?;
            let mut run = run_dir(&cli.out, "simulate")?;
            if let Some(p) = &sim.params {
                run.manifest.config_paths.push(p.display().to_string());
            }
            simulate_and_write(&mut run, &params, &sim)?;
            run.finish()?;
            Ok(EXIT_OK)
        }
        Command::Scenario { condition, severity, sim } => {
            let base = sim.load_params()?;
            let spec = builtin(condition, severity);
            let params = spec.apply(&base)?;
            let mut run =
                run_dir(&cli.out, &format!("scenario-{}-{}", condition.label(), severity.label()))?;
            run.write("scenario.toml", &spec.to_toml())?;
            run.write("params.toml", &params.to_toml())?;
            simulate_and_write(&mut run, &params, &sim)?;
            run.finish()?;
            Ok(EXIT_OK)
        }
        Command::Sobol { sim, n, threshold } => {
            let reference = sim.load_params()?;
            let variant = reference.variant;
            let names = ParameterSet::analysis_paths(variant);
            let design = saltelli_design(&reference, &names, n)?;
            println!(
                "design: {} parameters, {} rows ({} simulations)",
                design.dim(),
                design.len(),
                design.len()
            );
            let outputs = calibration_target_names(variant);
            let cfg = sim.config(variant);
            let body = sim.body(variant);
            let result = total_indices(&design, &outputs, |row| {
                let mut p = reference.clone();
                for (name, value) in design.names.iter().zip(row) {
                    p.set_path(name, *value).ok()?;
                }
                let trace = simulate(&p, &default_initial_state(&p), &cfg).ok()?;
                let report = compute_outputs(&trace.last_beat().ok()?, &p, &body).ok()?;
                Some(outputs.iter().map(|o| report.get(o).unwrap_or(f64::NAN)).collect())
            })?;
            let relevant = relevant_parameters(&result, threshold)?;
            let mut run = run_dir(&cli.out, "sobol")?;
            run.write("indices.csv", &sobol_csv(&result))?;
            run.write(
                "relevant.json",
                &serde_json::to_string_pretty(&relevant).expect("serializes"),
            )?;
            if !result.warnings.is_empty() {
                run.write("warnings.json", &serde_json::to_string_pretty(&result.warnings).expect("serializes"))?;
                for w in &result.warnings {
                    eprintln!("warning: {w}");
                }
            }
            println!(
                "{} failed rows; relevant at {threshold}: {}",
                result.failed_rows,
                relevant.join(", ")
            );
            run.finish()?;
            Ok(EXIT_OK)
        }
        Command::Groups { sim } => {
            let base = sim.load_params()?;
            let groups = builtin_groups(base.variant);
            let cfg = sim.config(base.variant);
            let rows = group_campaign(&base, &groups, &cfg, &sim.body(base.variant))?;
            let cells: usize = rows.iter().map(|r| r.indicators.count()).sum();
            println!("{} runs, {} indicator cells", rows.len(), cells);
            let mut run = run_dir(&cli.out, "groups")?;
            run.write("indicators.csv", &campaign_csv(&rows))?;
            run.finish()?;
            Ok(EXIT_OK)
        }
        Command::Calibrate { sim, targets, free, loss, max_iter, threshold } => {
            let initial = sim.load_params()?;
            let targets = TargetData::from_json(&std::fs::read_to_string(&targets)?)?;
            let free = if free.is_empty() {
                default_free_parameters(&output_root())?
            } else {
                free
            };
            let mut problem =
                CalibrationProblem::new(initial, free, targets, LossId::new(loss)?)?;
            problem.sim = sim.config(problem.initial.variant);
            problem.body = sim.body(problem.initial.variant);
            problem.max_iterations = max_iter;
            problem.success_threshold = threshold;
            let result = calibrate(&problem)?;
            let mut run = run_dir(&cli.out, "calibrate")?;
            run.write("fitted.toml", &result.fitted.to_toml())?;
            run.write("result.json", &serde_json::to_string_pretty(&result).expect("serializes"))?;
            run.finish()?;
            println!(
                "loss {} after {} iterations ({} evaluations), deviation {:.4}, success={}",
                result.final_loss,
                result.iterations,
                result.evaluations,
                result.total_deviation,
                result.success
            );
            Ok(if result.success { EXIT_OK } else { EXIT_CALIBRATION_FAILED })
        }
        Command::Lossstudy { losses, free, max_iter } => {
            let free = if free.is_empty() {
                default_free_parameters(&output_root())?
            } else {
                free
            };
            let mut setup = StudySetup::healthy(free);
            setup.max_iterations = max_iter;
            let cases: Vec<(Condition, Severity)> = Condition::ALL
                .into_iter()
                .flat_map(|c| Severity::ALL.into_iter().map(move |s| (c, s)))
                .collect();
            let loss_ids: Result<Vec<LossId>, Error> =
                losses.iter().map(|l| LossId::new(*l)).collect();
            let rows = loss_study(&setup, &cases, &loss_ids?)?;
            let mut run = run_dir(&cli.out, "lossstudy")?;
            run.write("study.csv", &study_csv(&rows))?;
            run.finish()?;
            println!("{} calibrations tabulated", rows.len());
            Ok(EXIT_OK)
        }
        Command::Match { reference, mutable, n, factors, strict, acceptable } => {
            if reference == mutable {
                return Err(Error::Domain("reference and mutable variants must differ".into()));
            }
            let ref_params = ParameterSet::healthy(reference);
            // the mutable model starts from the shared parameter values
            let mut_params = crate::matching::shared_start(&ref_params, mutable);
            // shared grid and initial state so the error compares like with like
            let cfg = IntegrationConfig::default_for(Variant::Capillary);
            let ref_init = default_initial_state(&ref_params);
            let mut_init = crate::engine::adapt_initial_state(&ref_init, mutable);
            let ref_trace = simulate(&ref_params, &ref_init, &cfg)?.last_beat()?;
            let match_cfg = MatchConfig {
                inner_repetitions: n,
                factor_schedule: factors,
                strict_threshold: strict,
                acceptable_threshold: acceptable,
                ..MatchConfig::default()
            };
            let outcome = match_models(&ref_trace, &mut_params, &mut_init, &match_cfg, &cfg)?;
            let mut run = run_dir(&cli.out, "match")?;
            run.write("matched.toml", &outcome.matched.to_toml())?;
            run.write("trajectory.csv", &trajectory_csv(outcome.initial_error, &outcome.trajectory))?;
            run.finish()?;
            println!(
                "error {} -> {} over {} trials; acceptable@{:?} strict@{:?} (tunables: {})",
                outcome.initial_error,
                outcome.final_error,
                outcome.trajectory.len(),
                outcome.acceptable_at,
                outcome.strict_at,
                tunable_paths(mutable).len()
            );
            Ok(EXIT_OK)
        }
        Command::Workflow { condition, severity, free, max_iter, loss } => {
            let free = if free.is_empty() {
                default_free_parameters(&output_root())?
            } else {
                free
            };
            let mut setup = StudySetup::healthy(free);
            setup.max_iterations = max_iter;
            let (targets, result) = workflow_0d(&setup, condition, severity, LossId::new(loss)?)?;
            let mut run =
                run_dir(&cli.out, &format!("workflow-{}-{}", condition.label(), severity.label()))?;
            run.write("targets.json", &targets.to_json())?;
            run.write("calibrated.toml", &result.fitted.to_toml())?;
            run.write("result.json", &serde_json::to_string_pretty(&result).expect("serializes"))?;
            run.finish()?;
            println!(
                "workflow {} {}: loss {} success={}",
                condition.label(),
                severity.label(),
                result.final_loss,
                result.success
            );
            Ok(if result.success { EXIT_OK } else { EXIT_CALIBRATION_FAILED })
        }
        Command::Report { params, trace, bsa } => {
            let params = ParameterSet::from_toml(&std::fs::read_to_string(&params)?)?;
            let text = std::fs::read_to_string(&trace)?;
            let full = parse_trace_csv(&text, &params)?;
            let last = full.last_beat()?;
            let body =
                bsa.map(|b| BodyMetrics { bsa: b }).unwrap_or_else(|| BodyMetrics::default_for(params.variant));
            let report = compute_outputs(&last, &params, &body)?;
            let verdicts = range_check(&report, &HealthyRanges::builtin(params.variant))?;
            let mut run = run_dir(&cli.out, "report")?;
            run.manifest.config_paths.push(trace.display().to_string());
            run.write("report.json", &report.to_json())?;
            run.write("verdicts.json", &verdicts.to_json())?;
            run.finish()?;
            println!("outputs={} all_in_range={}", report.len(), verdicts.all_in_range);
            Ok(EXIT_OK)
        }
    }
}
