//! Integration tests of the limit-cycle engine on the healthy reference
//! parameter sets.

use circ0d::engine::{default_initial_state, simulate, IntegrationConfig};
use circ0d::model::{
    total_stressed_volume, Chamber, ParameterSet, StateVector, Variant, Q_AV, Q_MV, Q_PV, Q_TV,
};
use circ0d::observables::{compute_outputs, BodyMetrics};

fn healthy_cfg(variant: Variant) -> IntegrationConfig {
    IntegrationConfig::default_for(variant)
}

#[test]
fn healthy_runs_converge_quickly() {
    for variant in [Variant::NonCapillary, Variant::Capillary] {
        let params = ParameterSet::healthy(variant);
        let trace = simulate(&params, &default_initial_state(&params), &healthy_cfg(variant))
            .unwrap();
        assert!(trace.converged, "{variant} residual {}", trace.residual);
        assert!(trace.beats_simulated <= 200, "{variant} took {}", trace.beats_simulated);
        assert!(trace.residual < 1e-3);
    }
}

#[test]
fn degenerate_zero_activation_settles_to_a_steady_state() {
    let mut params = ParameterSet::healthy(Variant::NonCapillary);
    for c in Chamber::ALL {
        params.chambers[c].active_elastance = 0.0; // no forcing
    }
    let cfg = IntegrationConfig { max_heartbeats: 400, ..healthy_cfg(Variant::NonCapillary) };
    let trace = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
    assert!(trace.converged);
    let last = trace.last_beat().unwrap();
    // all valve fluxes decay to the closed-valve leak scale
    for q in [Q_MV, Q_AV, Q_TV, Q_PV] {
        for node in 0..last.len() {
            let flux = last.algebraic[node][q];
            assert!(flux.abs() < 1.0, "flux {q} = {flux}");
        }
    }
    // and the state is essentially constant over the beat
    for i in 0..last.states[0].dim() {
        let first = last.states[0][i];
        let mid = last.states[last.len() / 2][i];
        assert!((first - mid).abs() <= 1e-3 * (first.abs() + 1.0));
    }
}

#[test]
fn halving_the_timestep_barely_moves_the_outputs() {
    // self-convergence of the integrator on the NC variant
    let params = ParameterSet::healthy(Variant::NonCapillary);
    let body = BodyMetrics::default_for(Variant::NonCapillary);
    let mut sap = Vec::new();
    for dt in [1e-3, 5e-4] {
        let cfg = IntegrationConfig {
            dt,
            convergence_tol: 1e-6,
            max_heartbeats: 600,
            ..IntegrationConfig::default()
        };
        let trace = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
        let report = compute_outputs(&trace.last_beat().unwrap(), &params, &body).unwrap();
        sap.push(report.get("SAP_max").unwrap());
    }
    let rel = (sap[0] / sap[1] - 1.0).abs();
    assert!(rel < 1e-3, "SAP_max moved by {rel:.2e} on dt halving");
}

#[test]
fn stressed_volume_is_conserved_through_integration() {
    for variant in [Variant::NonCapillary, Variant::Capillary] {
        let params = ParameterSet::healthy(variant);
        let cfg = IntegrationConfig {
            heartbeats_to_keep: 3,
            exact_heartbeats: Some(25),
            ..healthy_cfg(variant)
        };
        let trace = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
        let v0 = total_stressed_volume(&params, &trace.states[0]);
        let steps = trace.steps_per_beat();
        for beat in 1..=trace.beats_kept() {
            let v = total_stressed_volume(&params, &trace.states[beat * steps]);
            let drift = ((v - v0) / v0).abs() / beat as f64;
            assert!(drift < 1e-6, "{variant}: drift {drift:.2e} per beat");
        }
    }
}

#[test]
fn identical_inputs_reproduce_bitwise_identical_traces() {
    let params = ParameterSet::healthy(Variant::Capillary);
    let cfg = healthy_cfg(Variant::Capillary);
    let a = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
    let b = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
    assert_eq!(a.len(), b.len());
    for node in 0..a.len() {
        for i in 0..a.states[node].dim() {
            assert_eq!(a.states[node][i].to_bits(), b.states[node][i].to_bits());
        }
    }
}

#[test]
fn heartbeat_boundaries_sit_on_grid_nodes() {
    let params = ParameterSet::healthy(Variant::NonCapillary);
    let cfg = IntegrationConfig {
        dt: 1.1e-3, // deliberately not dividing T_HB; the engine snaps it
        heartbeats_to_keep: 4,
        exact_heartbeats: Some(8),
        ..IntegrationConfig::default()
    };
    let trace = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
    let t_hb = params.period();
    assert!((trace.dt * trace.steps_per_beat() as f64 - t_hb).abs() < 1e-12);
    for (m, k) in trace.beat_boundaries.iter().enumerate() {
        let node_time = trace.time[*k] - trace.time[0];
        assert!(
            (node_time - m as f64 * t_hb).abs() < trace.dt / 2.0,
            "boundary {m} at {node_time}"
        );
    }
}

#[test]
fn last_beat_window_is_exact_and_idempotent() {
    let params = ParameterSet::healthy(Variant::NonCapillary);
    let cfg = IntegrationConfig {
        heartbeats_to_keep: 5,
        exact_heartbeats: Some(30),
        ..healthy_cfg(Variant::NonCapillary)
    };
    let trace = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
    assert_eq!(trace.beats_kept(), 5);
    let last = trace.last_beat().unwrap();
    assert_eq!(last.len(), trace.steps_per_beat() + 1);
    let again = last.last_beat().unwrap();
    assert_eq!(last, again);
    // converged run: window endpoints nearly coincide component-wise
    for i in 0..last.states[0].dim() {
        let lo = last.states[0][i];
        let hi = last.states[last.len() - 1][i];
        assert!((hi - lo).abs() <= 2e-3 * (hi.abs() + 1.0), "component {i}: {lo} vs {hi}");
    }
}

#[test]
fn divergence_names_the_first_bad_component() {
    // variant C under the NC timestep exceeds the explicit stability bound
    let params = ParameterSet::healthy(Variant::Capillary);
    let cfg = IntegrationConfig { dt: 1e-3, ..IntegrationConfig::default() };
    let err = simulate(&params, &default_initial_state(&params), &cfg).unwrap_err();
    match err {
        circ0d::Error::Diverged { variable, time } => {
            assert!(!variable.is_empty());
            assert!(time > 0.0 && time < 5.0);
        }
        other => panic!("expected divergence, got {other}"),
    }
}

#[test]
fn dimension_mismatch_is_rejected_up_front() {
    let params = ParameterSet::healthy(Variant::Capillary);
    let wrong = StateVector::zeros(Variant::NonCapillary);
    assert!(matches!(
        simulate(&params, &wrong, &healthy_cfg(Variant::Capillary)),
        Err(circ0d::Error::VariantMismatch(_))
    ));
}

#[test]
fn kept_window_spans_the_requested_beats() {
    let params = ParameterSet::healthy(Variant::NonCapillary);
    for keep in [1usize, 2, 3] {
        let cfg = IntegrationConfig {
            heartbeats_to_keep: keep,
            exact_heartbeats: Some(6),
            ..healthy_cfg(Variant::NonCapillary)
        };
        let trace = simulate(&params, &default_initial_state(&params), &cfg).unwrap();
        assert_eq!(trace.len(), keep * trace.steps_per_beat() + 1);
        assert_eq!(trace.beat_boundaries.len(), keep + 1);
    }
}
