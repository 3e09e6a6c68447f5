//! Algebraic relations and ODE right-hand sides of both model variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::params::{Chamber, ChamberParams, ParameterSet, Valve, ValveParams, Variant};
use crate::model::state::*;

/// Valve opening law used when evaluating valve resistances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum ValveLaw {
    /// Hard switch at p_up = p_down; ties open the valve.
    #[default]
    Hard,
    /// Logistic blend between R_min and R_max with the given steepness
    /// (1/mmHg). Larger steepness approaches the hard switch.
    Smooth { steepness: f64 },
}

/// Normalized activation e(tau) of the half-cosine waveform.
///
/// tau is the time since contraction onset, already reduced mod T_HB. The
/// relaxation leg is clamped so the waveform returns to zero within one
/// cycle even when T_C + T_R exceeds T_HB, keeping E(t) continuous.
fn activation(tau: f64, t_c: f64, t_r: f64, t_hb: f64) -> f64 {
    use std::f64::consts::PI;
    let t_c = t_c.min(t_hb);
    let t_r = t_r.min(t_hb - t_c);
    if tau < t_c {
        0.5 * (1.0 - (PI * tau / t_c).cos())
    } else if tau < t_c + t_r {
        0.5 * (1.0 + (PI * (tau - t_c) / t_r).cos())
    } else {
        0.0
    }
}

/// Time-varying elastance E(t) = E^p + E^a * e(tau) of one chamber (mmHg/mL).
pub fn elastance(chamber: &ChamberParams, t: f64, t_hb: f64) -> f64 {
    let tau = (t - chamber.contraction_onset).rem_euclid(t_hb);
    chamber.passive_elastance
        + chamber.active_elastance
            * activation(tau, chamber.contraction_duration, chamber.relaxation_duration, t_hb)
}

/// Chamber pressure p = p_EX + E * (V - V_0) (mmHg).
pub fn chamber_pressure(chamber: &ChamberParams, e: f64, volume: f64, p_ex: f64) -> f64 {
    p_ex + e * (volume - chamber.resting_volume)
}

/// Valve resistance as a function of the pressures on its two sides.
pub fn valve_resistance(valve: &ValveParams, p_up: f64, p_down: f64) -> f64 {
    valve_resistance_with(valve, p_up, p_down, ValveLaw::Hard)
}

pub fn valve_resistance_with(valve: &ValveParams, p_up: f64, p_down: f64, law: ValveLaw) -> f64 {
    match law {
        ValveLaw::Hard => {
            if p_up >= p_down {
                valve.r_min
            } else {
                valve.r_max
            }
        }
        ValveLaw::Smooth { steepness } => {
            // sigmoid in the pressure gradient; 0.5 at zero gradient
            let w = 1.0 / (1.0 + (-steepness * (p_up - p_down)).exp());
            // blend conductances so the open branch dominates smoothly
            let g = w / valve.r_min + (1.0 - w) / valve.r_max;
            1.0 / g
        }
    }
}

/// Flux through a valve for the given pressure pair (mL/s).
fn valve_flux(valve: &ValveParams, p_up: f64, p_down: f64, law: ValveLaw) -> f64 {
    (p_up - p_down) / valve_resistance_with(valve, p_up, p_down, law)
}

/// Evaluates the algebraic vector c2 = W(t, c1).
pub fn algebraic(params: &ParameterSet, t: f64, state: &StateVector) -> Result<AlgebraicVector> {
    algebraic_with(params, t, state, ValveLaw::Hard)
}

pub fn algebraic_with(
    params: &ParameterSet,
    t: f64,
    state: &StateVector,
    law: ValveLaw,
) -> Result<AlgebraicVector> {
    if state.dim() != params.state_dim() {
        return Err(Error::VariantMismatch(format!(
            "state dimension {} does not match variant {}",
            state.dim(),
            params.variant
        )));
    }
    let t_hb = params.period();
    let p_ex = params.external_pressure;
    let mut alg = AlgebraicVector::zeros(params.variant);

    let volumes = [state[V_LA], state[V_LV], state[V_RA], state[V_RV]];
    for (i, chamber) in Chamber::ALL.iter().enumerate() {
        let ch = &params.chambers[*chamber];
        let e = elastance(ch, t, t_hb);
        alg[i] = chamber_pressure(ch, e, volumes[i], p_ex);
    }

    alg[Q_MV] = valve_flux(&params.valves[Valve::Mitral], alg[P_LA], alg[P_LV], law);
    alg[Q_AV] = valve_flux(&params.valves[Valve::Aortic], alg[P_LV], state[P_AR_SYS], law);
    alg[Q_TV] = valve_flux(&params.valves[Valve::Tricuspid], alg[P_RA], alg[P_RV], law);
    alg[Q_PV] = valve_flux(&params.valves[Valve::Pulmonary], alg[P_RV], state[P_AR_PUL], law);

    if params.variant == Variant::Capillary {
        let cap = params.capillary.as_ref().ok_or_else(|| {
            Error::VariantMismatch("variant C parameter set without capillary block".into())
        })?;
        alg[Q_C_SYS] = (state[P_C_SYS] - state[P_VEN_SYS]) / cap.r_sys;
        alg[Q_C_PUL] = (state[P_C_PUL] - state[P_VEN_PUL]) / cap.r_pul;
        alg[Q_SH] = (state[P_C_PUL] - state[P_VEN_PUL]) / cap.r_shunt;
    }
    Ok(alg)
}

/// ODE right-hand side dc1/dt = D(t, c1, c2) of the active variant.
pub fn rhs(params: &ParameterSet, t: f64, state: &StateVector) -> Result<StateVector> {
    rhs_with(params, t, state, ValveLaw::Hard)
}

pub fn rhs_with(
    params: &ParameterSet,
    t: f64,
    state: &StateVector,
    law: ValveLaw,
) -> Result<StateVector> {
    let alg = algebraic_with(params, t, state, law)?;
    Ok(rhs_from_algebraic(params, state, &alg))
}

/// Right-hand side with the algebraic vector already evaluated.
pub fn rhs_from_algebraic(
    params: &ParameterSet,
    state: &StateVector,
    alg: &AlgebraicVector,
) -> StateVector {
    let circ = &params.circulation;
    let mut d = StateVector::zeros(params.variant);

    d[V_LA] = state[Q_VEN_PUL] - alg[Q_MV];
    d[V_LV] = alg[Q_MV] - alg[Q_AV];
    d[V_RA] = state[Q_VEN_SYS] - alg[Q_TV];
    d[V_RV] = alg[Q_TV] - alg[Q_PV];

    d[P_AR_SYS] = (alg[Q_AV] - state[Q_AR_SYS]) / circ.systemic.arterial.capacitance;
    d[P_AR_PUL] = (alg[Q_PV] - state[Q_AR_PUL]) / circ.pulmonary.arterial.capacitance;

    // Arterial branches drain into the venous node (NC) or capillary node (C).
    let (ar_sys_down, ar_pul_down, ven_sys_in, ven_pul_in) = match params.variant {
        Variant::NonCapillary => {
            (state[P_VEN_SYS], state[P_VEN_PUL], state[Q_AR_SYS], state[Q_AR_PUL])
        }
        Variant::Capillary => {
            (state[P_C_SYS], state[P_C_PUL], alg[Q_C_SYS], alg[Q_SH] + alg[Q_C_PUL])
        }
    };

    d[P_VEN_SYS] = (ven_sys_in - state[Q_VEN_SYS]) / circ.systemic.venous.capacitance;
    d[P_VEN_PUL] = (ven_pul_in - state[Q_VEN_PUL]) / circ.pulmonary.venous.capacitance;

    let rl = |q: f64, p_up: f64, p_down: f64, r: f64, l: f64| -(q + (p_down - p_up) / r) * (r / l);
    d[Q_AR_SYS] = rl(
        state[Q_AR_SYS],
        state[P_AR_SYS],
        ar_sys_down,
        circ.systemic.arterial.resistance,
        circ.systemic.arterial.inductance,
    );
    d[Q_VEN_SYS] = rl(
        state[Q_VEN_SYS],
        state[P_VEN_SYS],
        alg[P_RA],
        circ.systemic.venous.resistance,
        circ.systemic.venous.inductance,
    );
    d[Q_AR_PUL] = rl(
        state[Q_AR_PUL],
        state[P_AR_PUL],
        ar_pul_down,
        circ.pulmonary.arterial.resistance,
        circ.pulmonary.arterial.inductance,
    );
    d[Q_VEN_PUL] = rl(
        state[Q_VEN_PUL],
        state[P_VEN_PUL],
        alg[P_LA],
        circ.pulmonary.venous.resistance,
        circ.pulmonary.venous.inductance,
    );

    if params.variant == Variant::Capillary {
        let cap = params.capillary.as_ref().expect("validated variant C");
        d[P_C_SYS] = (state[Q_AR_SYS] - alg[Q_C_SYS]) / cap.c_sys;
        d[P_C_PUL] = (state[Q_AR_PUL] - alg[Q_SH] - alg[Q_C_PUL]) / (cap.c_pul + cap.c_shunt);
    }
    d
}

/// Total stressed blood volume: chamber volumes plus capacitance-weighted
/// node pressures. Exactly conserved by the closed loop.
pub fn total_stressed_volume(params: &ParameterSet, state: &StateVector) -> f64 {
    let circ = &params.circulation;
    let mut v = state[V_LA] + state[V_LV] + state[V_RA] + state[V_RV];
    v += circ.systemic.arterial.capacitance * state[P_AR_SYS];
    v += circ.systemic.venous.capacitance * state[P_VEN_SYS];
    v += circ.pulmonary.arterial.capacitance * state[P_AR_PUL];
    v += circ.pulmonary.venous.capacitance * state[P_VEN_PUL];
    if params.variant == Variant::Capillary {
        let cap = params.capillary.as_ref().expect("validated variant C");
        v += cap.c_sys * state[P_C_SYS];
        v += (cap.c_pul + cap.c_shunt) * state[P_C_PUL];
    }
    v
}

/// Time derivative of the total stressed volume, assembled from the
/// right-hand side terms. Analytically zero for both variants.
pub fn stressed_volume_rate(params: &ParameterSet, d: &StateVector) -> f64 {
    total_stressed_volume(params, d)
}
