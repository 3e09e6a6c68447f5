//! Saltelli sampling design and total Sobol index estimation.
//!
//! The design holds 2N(N_p + 1) parameter vectors: the base matrices A and
//! B (drawn from one 2N_p-dimensional Sobol stream) plus both radial
//! families A_B^(k) and B_A^(k). Total indices use the Jansen estimator,
//! averaged over the two radial families.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ParameterSet;

use super::sobol::SobolSequence;

/// Row identity inside a Saltelli design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    A,
    B,
    /// A with column k replaced by B's column k.
    AB(usize),
    /// B with column k replaced by A's column k.
    BA(usize),
}

/// The full sampling design over a hypercube.
#[derive(Debug, Clone, Serialize)]
pub struct SamplingDesign {
    /// Parameter names, one per dimension.
    pub names: Vec<String>,
    /// Closed sampling interval per parameter.
    pub intervals: Vec<(f64, f64)>,
    /// Base sample count N.
    pub base_samples: usize,
    /// All rows, layout: A (N), B (N), AB(0..d) (N each), BA(0..d) (N each).
    pub rows: Vec<Vec<f64>>,
}

impl SamplingDesign {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Total row count, 2N(N_p + 1).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn kind_of(&self, row: usize) -> RowKind {
        let n = self.base_samples;
        match row / n {
            0 => RowKind::A,
            1 => RowKind::B,
            block => {
                let k = block - 2;
                if k < self.dim() {
                    RowKind::AB(k)
                } else {
                    RowKind::BA(k - self.dim())
                }
            }
        }
    }
}

/// Builds the Saltelli design on explicit intervals.
pub fn saltelli_design_on(
    names: &[String],
    intervals: &[(f64, f64)],
    base_samples: usize,
) -> Result<SamplingDesign> {
    let d = names.len();
    if d == 0 || intervals.len() != d {
        return Err(Error::Domain("design needs matching names and intervals".into()));
    }
    if base_samples == 0 || !base_samples.is_power_of_two() {
        return Err(Error::Domain(format!(
            "base sample count must be a power of two, got {base_samples}"
        )));
    }
    for (name, (lo, hi)) in names.iter().zip(intervals) {
        if !(lo < hi) {
            return Err(Error::Domain(format!("empty interval for `{name}`: [{lo}, {hi}]")));
        }
    }
    let mut stream = SobolSequence::new(2 * d)?;
    let n = base_samples;
    let scale =
        |k: usize, u: f64| -> f64 { intervals[k].0 + u * (intervals[k].1 - intervals[k].0) };
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        let point = stream.next_point();
        a.push((0..d).map(|k| scale(k, point[k])).collect::<Vec<f64>>());
        b.push((0..d).map(|k| scale(k, point[d + k])).collect::<Vec<f64>>());
    }
    let mut rows = Vec::with_capacity(2 * n * (d + 1));
    rows.extend(a.iter().cloned());
    rows.extend(b.iter().cloned());
    for k in 0..d {
        for i in 0..n {
            let mut row = a[i].clone();
            row[k] = b[i][k];
            rows.push(row);
        }
    }
    for k in 0..d {
        for i in 0..n {
            let mut row = b[i].clone();
            row[k] = a[i][k];
            rows.push(row);
        }
    }
    Ok(SamplingDesign {
        names: names.to_vec(),
        intervals: intervals.to_vec(),
        base_samples: n,
        rows,
    })
}

/// Builds the design around a reference parameter set: each analysed
/// parameter varies within [1/3, 5/3] of its reference value; everything
/// not listed (heart rate, cycle timings, ...) stays at reference.
pub fn saltelli_design(
    reference: &ParameterSet,
    names: &[String],
    base_samples: usize,
) -> Result<SamplingDesign> {
    let mut intervals = Vec::with_capacity(names.len());
    for name in names {
        let p = reference.get_path(name)?;
        intervals.push((p / 3.0, 5.0 * p / 3.0));
    }
    saltelli_design_on(names, &intervals, base_samples)
}

/// Materializes one design row as a full parameter set.
pub fn row_parameters(
    design: &SamplingDesign,
    reference: &ParameterSet,
    row: usize,
) -> Result<ParameterSet> {
    let mut params = reference.clone();
    for (name, value) in design.names.iter().zip(&design.rows[row]) {
        params.set_path(name, *value)?;
    }
    Ok(params)
}

/// Matrix of total Sobol indices: rows = parameters, columns = outputs.
#[derive(Debug, Clone, Serialize)]
pub struct SobolResult {
    pub parameter_names: Vec<String>,
    pub output_names: Vec<String>,
    /// total_indices[k][j] = contribution of parameter k to output j.
    pub total_indices: Vec<Vec<f64>>,
    /// Number of failed (non-finite) evaluations per design block.
    pub failed_rows: usize,
    /// Reliability warnings per output column (> 5% of pairs excluded).
    pub warnings: Vec<String>,
}

impl SobolResult {
    pub fn index(&self, parameter: &str, output: &str) -> Option<f64> {
        let k = self.parameter_names.iter().position(|p| p == parameter)?;
        let j = self.output_names.iter().position(|o| o == output)?;
        Some(self.total_indices[k][j])
    }
}

/// Evaluates the design and estimates total indices column by column.
///
/// The evaluator returns one value per output name, or None for a failed
/// simulation; failed rows are excluded pairwise from the estimator.
pub fn total_indices<F>(
    design: &SamplingDesign,
    output_names: &[String],
    evaluator: F,
) -> Result<SobolResult>
where
    F: Fn(&[f64]) -> Option<Vec<f64>> + Sync,
{
    let d = design.dim();
    let n = design.base_samples;
    let n_out = output_names.len();
    if n_out == 0 {
        return Err(Error::Domain("no outputs to analyse".into()));
    }
    // evaluate all rows (in parallel); NaN marks failures
    let evals: Vec<Vec<f64>> = design
        .rows
        .par_iter()
        .map(|row| match evaluator(row) {
            Some(v) => {
                debug_assert_eq!(v.len(), n_out);
                v
            }
            None => vec![f64::NAN; n_out],
        })
        .collect();
    let failed_rows = evals.iter().filter(|v| v.iter().any(|x| !x.is_finite())).count();

    let f_a = &evals[0..n];
    let f_b = &evals[n..2 * n];
    let block = |kind_offset: usize, k: usize| &evals[(2 + kind_offset + k) * n..(3 + kind_offset + k) * n];

    let mut warnings = Vec::new();
    let mut total = vec![vec![0.0; n_out]; d];
    for j in 0..n_out {
        // variance over the finite A u B evaluations
        let pool: Vec<f64> = f_a
            .iter()
            .chain(f_b.iter())
            .map(|row| row[j])
            .filter(|x| x.is_finite())
            .collect();
        if pool.is_empty() {
            warnings.push(format!("{}: all evaluations failed", output_names[j]));
            continue;
        }
        let mean = pool.iter().sum::<f64>() / pool.len() as f64;
        let var = pool.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / pool.len() as f64;

        let mut excluded_max = 0usize;
        for k in 0..d {
            let f_ab = block(0, k);
            let f_ba = block(d, k);
            let mut sum_sq = 0.0;
            let mut pairs = 0usize;
            for i in 0..n {
                if f_a[i][j].is_finite() && f_ab[i][j].is_finite() {
                    sum_sq += (f_a[i][j] - f_ab[i][j]).powi(2);
                    pairs += 1;
                }
                if f_b[i][j].is_finite() && f_ba[i][j].is_finite() {
                    sum_sq += (f_b[i][j] - f_ba[i][j]).powi(2);
                    pairs += 1;
                }
            }
            excluded_max = excluded_max.max(2 * n - pairs);
            // Jansen: S_T = E[(f(A) - f(A_B))^2] / (2 Var)
            total[k][j] = if var > 0.0 && pairs > 0 {
                sum_sq / (2.0 * pairs as f64) / var
            } else {
                0.0
            };
        }
        if excluded_max * 20 > 2 * n {
            warnings.push(format!(
                "{}: {excluded_max} of {} estimator pairs excluded by failed runs",
                output_names[j],
                2 * n
            ));
        }
    }
    Ok(SobolResult {
        parameter_names: design.names.clone(),
        output_names: output_names.to_vec(),
        total_indices: total,
        failed_rows,
        warnings,
    })
}

/// Parameters whose total index reaches the threshold for at least one
/// output, in design order.
pub fn relevant_parameters(result: &SobolResult, threshold: f64) -> Result<Vec<String>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Domain(format!("threshold {threshold} outside (0, 1]")));
    }
    Ok(result
        .parameter_names
        .iter()
        .enumerate()
        .filter(|(k, _)| result.total_indices[*k].iter().any(|s| *s >= threshold))
        .map(|(_, name)| name.clone())
        .collect())
}
