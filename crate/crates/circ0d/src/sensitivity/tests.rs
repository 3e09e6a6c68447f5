use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::engine::{default_initial_state, simulate, IntegrationConfig};
use crate::model::{ParameterSet, Variant};
use crate::observables::{compute_outputs, BodyMetrics, OutputReport};

#[test]
fn sobol_dimension_one_matches_the_reference_prefix() {
    let pts = sobol_sequence(1, 8).unwrap();
    let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
    assert_eq!(xs, vec![0.0, 0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125]);
}

#[test]
fn sobol_matches_published_reference_points() {
    // Frozen from the published Joe-Kuo direction-number set (same table
    // SciPy ships); first 9 points in 8 dimensions.
    let expected: [[f64; 8]; 9] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
        [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75],
        [0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25],
        [0.375, 0.375, 0.625, 0.875, 0.375, 0.125, 0.375, 0.875],
        [0.875, 0.875, 0.125, 0.375, 0.875, 0.625, 0.875, 0.375],
        [0.625, 0.125, 0.875, 0.625, 0.625, 0.875, 0.125, 0.125],
        [0.125, 0.625, 0.375, 0.125, 0.125, 0.375, 0.625, 0.625],
        [0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125, 0.4375, 0.9375],
    ];
    let pts = sobol_sequence(8, 9).unwrap();
    for (row, want) in pts.iter().zip(expected.iter()) {
        for (x, w) in row.iter().zip(want.iter()) {
            assert_eq!(x, w);
        }
    }
    // spot-check the highest dimensions of the table
    let pts = sobol_sequence(64, 8).unwrap();
    let col = |d: usize| pts.iter().map(|p| p[d]).collect::<Vec<f64>>();
    assert_eq!(col(31), vec![0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]);
    assert_eq!(col(63), vec![0.0, 0.5, 0.75, 0.25, 0.125, 0.625, 0.875, 0.375]);
}

#[test]
fn sobol_stream_is_deterministic_and_in_unit_cube() {
    let a = sobol_sequence(13, 200).unwrap();
    let b = sobol_sequence(13, 200).unwrap();
    assert_eq!(a, b);
    for p in &a {
        assert!(p.iter().all(|x| (0.0..1.0).contains(x)));
    }
}

#[test]
fn sobol_coordinates_are_dyadically_balanced() {
    // any power-of-two prefix fills dyadic bins uniformly per coordinate
    for dim in [1usize, 5, 29, 64] {
        let pts = sobol_sequence(dim, 256).unwrap();
        for d in 0..dim {
            let mut bins = [0usize; 16];
            for p in &pts {
                bins[(p[d] * 16.0) as usize] += 1;
            }
            assert!(bins.iter().all(|&c| c == 16), "dim {dim} coord {d}: {bins:?}");
        }
    }
}

/// Coarse star-discrepancy estimate on an anchored-box grid.
fn grid_discrepancy(points: &[Vec<f64>]) -> f64 {
    let m = 32;
    let n = points.len() as f64;
    let mut worst: f64 = 0.0;
    for i in 1..=m {
        for j in 1..=m {
            let (x, y) = (i as f64 / m as f64, j as f64 / m as f64);
            let count = points.iter().filter(|p| p[0] < x && p[1] < y).count() as f64;
            worst = worst.max((count / n - x * y).abs());
        }
    }
    worst
}

#[test]
fn sobol_beats_uniform_random_on_discrepancy() {
    use rand::{Rng, SeedableRng};
    let sobol = grid_discrepancy(&sobol_sequence(2, 1024).unwrap());
    let mut random_discrepancies: Vec<f64> = (0..20u64)
        .map(|seed| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> =
                (0..1024).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
            grid_discrepancy(&pts)
        })
        .collect();
    random_discrepancies.sort_by(f64::total_cmp);
    let median = random_discrepancies[10];
    assert!(
        sobol < median,
        "sobol discrepancy {sobol} should beat random median {median}"
    );
}

#[test]
fn saltelli_row_counts() {
    let names: Vec<String> = (0..3).map(|k| format!("x{k}")).collect();
    let intervals = vec![(0.0, 1.0); 3];
    let design = saltelli_design_on(&names, &intervals, 4).unwrap();
    assert_eq!(design.len(), 32); // 2 * 4 * (3 + 1)
    assert!(matches!(design.kind_of(0), RowKind::A));
    assert!(matches!(design.kind_of(7), RowKind::B));
    assert!(matches!(design.kind_of(8), RowKind::AB(0)));
    assert!(matches!(design.kind_of(20), RowKind::BA(0)));
}

#[test]
fn saltelli_rejects_bad_inputs() {
    let names = vec!["x".to_string()];
    assert!(saltelli_design_on(&names, &[(0.0, 1.0)], 5).is_err());
    assert!(saltelli_design_on(&names, &[(1.0, 1.0)], 4).is_err());
    assert!(saltelli_design_on(&[], &[], 4).is_err());
}

#[test]
fn saltelli_rows_stay_inside_the_hypercube() {
    let p_ref = ParameterSet::healthy(Variant::NonCapillary);
    let names = ParameterSet::analysis_paths(Variant::NonCapillary);
    let design = saltelli_design(&p_ref, &names, 16).unwrap();
    assert_eq!(design.len(), 2 * 16 * 27);
    for row in &design.rows {
        for (k, x) in row.iter().enumerate() {
            let (lo, hi) = design.intervals[k];
            assert!(*x >= lo && *x <= hi);
        }
    }
    // unanalysed parameters stay at reference
    let materialized = row_parameters(&design, &p_ref, 3).unwrap();
    assert_eq!(materialized.heart_rate, p_ref.heart_rate);
    assert_eq!(
        materialized.chambers[crate::model::Chamber::LeftVentricle].contraction_onset,
        p_ref.chambers[crate::model::Chamber::LeftVentricle].contraction_onset
    );
}

/// Analytic total Sobol indices of the Ishigami function, derived from its
/// variance decomposition (independent of the estimator under test).
fn ishigami_analytic_totals(a: f64, b: f64) -> [f64; 3] {
    let pi = std::f64::consts::PI;
    let d1 = 0.5 * (1.0 + b * pi.powi(4) / 5.0).powi(2);
    let d2 = a * a / 8.0;
    let d13 = 8.0 * b * b * pi.powi(8) / 225.0;
    let total = d1 + d2 + d13;
    [(d1 + d13) / total, d2 / total, d13 / total]
}

fn ishigami(a: f64, b: f64, x: &[f64]) -> f64 {
    x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
}

#[test]
fn jansen_estimator_recovers_ishigami_totals() {
    let pi = std::f64::consts::PI;
    let names: Vec<String> = (1..=3).map(|k| format!("x{k}")).collect();
    let design = saltelli_design_on(&names, &[(-pi, pi); 3], 1 << 12).unwrap();
    let outputs = vec!["f".to_string()];
    let result =
        total_indices(&design, &outputs, |x| Some(vec![ishigami(7.0, 0.1, x)])).unwrap();
    let expected = ishigami_analytic_totals(7.0, 0.1);
    assert_relative_eq!(expected[0], 0.5576, max_relative = 1e-3);
    assert_relative_eq!(expected[1], 0.4424, max_relative = 1e-3);
    assert_relative_eq!(expected[2], 0.2437, max_relative = 1e-3);
    for k in 0..3 {
        let got = result.total_indices[k][0];
        assert!(
            (got - expected[k]).abs() < 0.05,
            "S_T{k} = {got}, analytic {}",
            expected[k]
        );
    }
    assert!(result.warnings.is_empty());
}

#[test]
fn constant_evaluator_yields_zero_indices() {
    let names = vec!["x".to_string(), "y".to_string()];
    let design = saltelli_design_on(&names, &[(0.0, 1.0); 2], 64).unwrap();
    let result = total_indices(&design, &["c".to_string()], |_| Some(vec![3.5])).unwrap();
    for k in 0..2 {
        assert_eq!(result.total_indices[k][0], 0.0);
    }
}

#[test]
fn additive_function_totals_match_variance_shares() {
    // f = sum of w_k x_k over independent uniforms: S_k^T = w_k^2 / sum w^2
    let names: Vec<String> = (0..4).map(|k| format!("x{k}")).collect();
    let design = saltelli_design_on(&names, &[(0.0, 1.0); 4], 1 << 11).unwrap();
    let weights = [1.0, 2.0, 3.0, 0.5];
    let result = total_indices(&design, &["f".to_string()], |x| {
        Some(vec![x.iter().zip(weights.iter()).map(|(a, w)| a * w).sum()])
    })
    .unwrap();
    let denom: f64 = weights.iter().map(|w| w * w).sum();
    for k in 0..4 {
        let expected = weights[k] * weights[k] / denom;
        assert!(
            (result.total_indices[k][0] - expected).abs() < 0.05,
            "k={k}: {} vs {expected}",
            result.total_indices[k][0]
        );
    }
}

#[test]
fn single_coordinate_function_dominates_its_total_index() {
    let names: Vec<String> = (0..5).map(|k| format!("x{k}")).collect();
    let design = saltelli_design_on(&names, &[(0.0, 1.0); 5], 1 << 10).unwrap();
    let result =
        total_indices(&design, &["f".to_string()], |x| Some(vec![(6.0 * x[2]).sin()])).unwrap();
    for k in 0..5 {
        let s = result.total_indices[k][0];
        if k == 2 {
            assert!(s >= 0.9, "active coordinate index {s}");
        } else {
            assert!(s <= 0.05, "inactive coordinate {k} index {s}");
        }
    }
}

#[test]
fn failed_rows_are_excluded_pairwise_with_warning() {
    let names = vec!["x".to_string(), "y".to_string()];
    let design = saltelli_design_on(&names, &[(0.0, 1.0); 2], 256).unwrap();
    // fail a visible slice of the evaluations
    let result = total_indices(&design, &["f".to_string()], |x| {
        if x[0] > 0.9 {
            None
        } else {
            Some(vec![x[0] + 0.1 * x[1]])
        }
    })
    .unwrap();
    assert!(result.failed_rows > 0);
    assert!(!result.warnings.is_empty());
    assert!(result.total_indices[0][0].is_finite());
}

#[test]
fn relevant_parameter_thresholding() {
    let result = SobolResult {
        parameter_names: vec!["a".into(), "b".into(), "c".into()],
        output_names: vec!["o1".into(), "o2".into()],
        total_indices: vec![vec![0.35, 0.1], vec![0.05, 0.19], vec![0.01, 0.6]],
        failed_rows: 0,
        warnings: vec![],
    };
    assert_eq!(relevant_parameters(&result, 0.2).unwrap(), vec!["a", "c"]);
    assert_eq!(relevant_parameters(&result, 1.0).unwrap(), Vec::<String>::new());
    assert_eq!(relevant_parameters(&result, 1e-9).unwrap(), vec!["a", "b", "c"]);
    assert!(relevant_parameters(&result, 0.0).is_err());
}

#[test]
fn group_coefficient_family() {
    use CoefficientKind::*;
    assert_relative_eq!(group_coefficients(Resistance, 5).unwrap(), 1.75, max_relative = 1e-14);
    assert_relative_eq!(group_coefficients(Capacitance, -5).unwrap(), 1.3, max_relative = 1e-14);
    assert_relative_eq!(group_coefficients(RestingVolume, 1).unwrap(), 0.95, max_relative = 1e-14);
    assert_relative_eq!(group_coefficients(Inductance, 2).unwrap(), 1.15, max_relative = 1e-14);
    assert_relative_eq!(group_coefficients(ActiveElastance, -1).unwrap(), 0.88, max_relative = 1e-14);
    assert_relative_eq!(group_coefficients(PassiveElastance, 1).unwrap(), 1.14, max_relative = 1e-14);
    assert!(group_coefficients(Resistance, 0).is_err());
    assert!(group_coefficients(Resistance, 6).is_err());
    assert!(group_coefficients(Resistance, -6).is_err());
}

#[test]
fn builtin_group_counts() {
    assert_eq!(builtin_groups(Variant::NonCapillary).len(), 5);
    assert_eq!(builtin_groups(Variant::Capillary).len(), 7);
    // every member path resolves on its variant
    let base = ParameterSet::healthy(Variant::Capillary);
    for g in builtin_groups(Variant::Capillary) {
        for (path, _) in &g.members {
            base.get_path(path).unwrap();
        }
    }
}

fn healthy_nc_run() -> (crate::engine::SimulationTrace, OutputReport) {
    let params = ParameterSet::healthy(Variant::NonCapillary);
    let cfg = IntegrationConfig::default_for(Variant::NonCapillary);
    let trace = simulate(&params, &default_initial_state(&params), &cfg)
        .unwrap()
        .last_beat()
        .unwrap();
    let report =
        compute_outputs(&trace, &params, &BodyMetrics::default_for(Variant::NonCapillary)).unwrap();
    (trace, report)
}

#[test]
fn identical_traces_give_the_identity_indicator_set() {
    let (trace, report) = healthy_nc_run();
    let ind = indicators(&trace, &trace, &report, &report).unwrap();
    assert_eq!(ind.count(), 129); // 45 outputs + 4*20 variables + 4 PV ratios
    for (_, v) in &ind.outputs {
        assert_relative_eq!(v.unwrap(), 0.0, epsilon = 1e-12);
    }
    for (_, vs) in &ind.variables {
        for v in vs.iter().flatten() {
            assert_relative_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }
    for (_, r) in &ind.pv_ratios {
        assert_relative_eq!(r.unwrap(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn pointwise_scaling_moves_every_variable_indicator_by_ten_percent() {
    let (trace, report) = healthy_nc_run();
    let mut scaled = trace.clone();
    for s in &mut scaled.states {
        for i in 0..s.dim() {
            s[i] *= 1.1;
        }
    }
    for a in &mut scaled.algebraic {
        for i in 0..a.dim() {
            a[i] *= 1.1;
        }
    }
    let ind = indicators(&trace, &scaled, &report, &report).unwrap();
    for (name, [gt, gmean, gmax, gmin]) in &ind.variables {
        for g in [gt, gmean, gmax, gmin].into_iter().flatten() {
            assert_relative_eq!(*g, 10.0, max_relative = 1e-9, epsilon = 1e-9);
        }
        let _ = name;
    }
    // areas scale quadratically
    for (_, r) in &ind.pv_ratios {
        assert_relative_eq!(r.unwrap(), 1.21, max_relative = 1e-9);
    }
}

#[test]
fn zero_reference_marks_indicators_undefined_without_crashing() {
    let (trace, report) = healthy_nc_run();
    let mut zeroed = trace.clone();
    for s in &mut zeroed.states {
        s[crate::model::Q_AR_SYS] = 0.0;
    }
    let ind = indicators(&zeroed, &trace, &report, &report).unwrap();
    let gammas = &ind.variables["Q_AR_SYS"];
    assert!(gammas[0].is_none() || gammas[1].is_none() || gammas.iter().any(|g| g.is_none()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn coefficients_are_positive_and_monotone_in_rho(rho in 1i32..=5) {
        use CoefficientKind::*;
        for kind in [Resistance, Inductance, Capacitance, ActiveElastance, PassiveElastance, RestingVolume] {
            let up = group_coefficients(kind, rho).unwrap();
            let down = group_coefficients(kind, -rho).unwrap();
            prop_assert!(up > 0.0 && down > 0.0);
            // the two sides bracket 1
            prop_assert!((up - 1.0) * (down - 1.0) <= 0.0);
        }
    }
}
