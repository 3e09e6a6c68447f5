//! Run directories, manifests and tabular artifact writers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::calibration::StudyRow;
use crate::engine::SimulationTrace;
use crate::error::{Error, Result};
use crate::matching::MatchStep;
use crate::model::{ParameterSet, StateVector, VarId};
use crate::sensitivity::{CampaignRow, SobolResult};

/// Record of one command invocation, appended to `manifest.jsonl` in the
/// run directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub tool_version: &'static str,
    pub config_paths: Vec<String>,
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            tool_version: env!("CARGO_PKG_VERSION"),
            config_paths: Vec::new(),
            artifacts: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn append_to(&self, dir: &Path) -> Result<()> {
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join("manifest.jsonl"))?;
        let line = serde_json::to_string(self).expect("manifest serializes");
        writeln!(file, "{line}")?;
        Ok(())
    }
}

/// Tracks every file a command produces.
pub struct RunDir {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    started: std::time::Instant,
}

impl RunDir {
    pub fn create(dir: PathBuf, command: &str) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(RunDir { dir, manifest: RunManifest::new(command), started: std::time::Instant::now() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.manifest.artifacts.push(name.to_string());
        Ok(path)
    }

    pub fn finish(mut self) -> Result<()> {
        self.manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        self.manifest.append_to(&self.dir)
    }
}

/// Default output root: $CIRC0D_OUT or ./runs.
pub fn output_root() -> PathBuf {
    std::env::var_os("CIRC0D_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"))
}

pub fn trace_csv(trace: &SimulationTrace) -> String {
    let mut out = Vec::new();
    trace.write_csv(&mut out).expect("in-memory write");
    String::from_utf8(out).expect("csv is utf-8")
}

/// Parses a trace CSV back into a trace window; the parameter set supplies
/// the variant and beat period.
pub fn parse_trace_csv(text: &str, params: &ParameterSet) -> Result<SimulationTrace> {
    let variant = params.variant;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("trace csv: {e}")))?
        .clone();
    let vars = VarId::all(variant);
    if headers.len() != vars.len() + 1 || &headers[0] != "time" {
        return Err(Error::Format(format!(
            "trace csv has {} columns, variant {variant} expects time + {}",
            headers.len(),
            vars.len()
        )));
    }
    for (i, var) in vars.iter().enumerate() {
        if &headers[i + 1] != var.name() {
            return Err(Error::Format(format!(
                "trace csv column {} is `{}`, expected `{}`",
                i + 1,
                &headers[i + 1],
                var.name()
            )));
        }
    }
    let mut time = Vec::new();
    let mut states = Vec::new();
    let mut algebraic = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(format!("trace csv: {e}")))?;
        let parse = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|e| Error::Format(format!("trace csv field {i}: {e}")))
        };
        time.push(parse(0)?);
        let mut s = StateVector::zeros(variant);
        for i in 0..variant.state_dim() {
            s[i] = parse(1 + i)?;
        }
        states.push(s);
        let mut a = crate::model::AlgebraicVector::zeros(variant);
        for i in 0..variant.algebraic_dim() {
            a[i] = parse(1 + variant.state_dim() + i)?;
        }
        algebraic.push(a);
    }
    if time.len() < 3 {
        return Err(Error::Format("trace csv holds fewer than 3 rows".into()));
    }
    let dt = time[1] - time[0];
    let t_hb = params.period();
    let steps = (t_hb / dt).round() as usize;
    if steps < 2 || (time.len() - 1) % steps != 0 {
        return Err(Error::GridMismatch(format!(
            "trace of {} rows does not span whole beats of {} steps",
            time.len(),
            steps
        )));
    }
    let beats = (time.len() - 1) / steps;
    Ok(SimulationTrace {
        variant,
        dt: t_hb / steps as f64,
        t_hb,
        time,
        states,
        algebraic,
        beat_boundaries: (0..=beats).map(|b| b * steps).collect(),
        converged: true,
        residual: f64::NAN,
        beats_simulated: beats,
    })
}

/// Total-index matrix as CSV: one row per parameter, one column per output.
pub fn sobol_csv(result: &SobolResult) -> String {
    let mut out = String::new();
    out.push_str("parameter");
    for name in &result.output_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (k, parameter) in result.parameter_names.iter().enumerate() {
        out.push_str(parameter);
        for j in 0..result.output_names.len() {
            out.push(',');
            out.push_str(&format!("{}", result.total_indices[k][j]));
        }
        out.push('\n');
    }
    out
}

/// Group campaign indicators in long form.
pub fn campaign_csv(rows: &[CampaignRow]) -> String {
    let mut out = String::from("group,rho,kind,name,indicator,value\n");
    let mut push = |group: &str, rho: i32, kind: &str, name: &str, ind: &str, v: Option<f64>| {
        let value = v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!("{group},{rho},{kind},{name},{ind},{value}\n"));
    };
    for row in rows {
        for (name, v) in &row.indicators.outputs {
            push(&row.group, row.rho, "output", name, "Gamma", *v);
        }
        for (name, [gt, gmean, gmax, gmin]) in &row.indicators.variables {
            push(&row.group, row.rho, "variable", name, "Gamma_T", *gt);
            push(&row.group, row.rho, "variable", name, "Gamma_mean", *gmean);
            push(&row.group, row.rho, "variable", name, "Gamma_max", *gmax);
            push(&row.group, row.rho, "variable", name, "Gamma_min", *gmin);
        }
        for (name, r) in &row.indicators.pv_ratios {
            push(&row.group, row.rho, "pv_loop", name, "area_ratio", *r);
        }
    }
    out
}

/// Loss-study table as CSV.
pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from("condition,severity,loss,time_s,total_deviation,final_loss,success,iterations\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.condition.label(),
            r.severity.label(),
            r.loss,
            r.wall_time_s,
            r.total_deviation,
            r.final_loss,
            r.success,
            r.iterations
        ));
    }
    out
}

/// Matching trajectory as CSV.
pub fn trajectory_csv(initial_error: f64, steps: &[MatchStep]) -> String {
    let mut out = String::from("iteration,parameter,factor,error,accepted,diverged\n");
    out.push_str(&format!("0,<initial>,1,{initial_error},true,false\n"));
    for s in steps {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.iteration, s.parameter, s.factor, s.error, s.accepted, s.diverged
        ));
    }
    out
}
