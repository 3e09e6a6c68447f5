//! Parameter and state spaces of the two 0D circulation variants, the
//! time-varying elastance law, and the ODE right-hand sides.

mod eval;
mod params;
mod paths;
mod state;

pub use eval::{
    algebraic, algebraic_with, chamber_pressure, elastance, rhs, rhs_from_algebraic, rhs_with,
    stressed_volume_rate, total_stressed_volume, valve_resistance, valve_resistance_with, ValveLaw,
};
pub use params::{
    Branch, CapillaryParams, Chamber, ChamberParams, ChamberSet, Circulation, ParameterSet,
    RlcBranch, SideBranches, Valve, ValveParams, ValveSet, Variant,
};
pub use state::{
    AlgebraicVector, StateVector, VarId, ALGEBRAIC_NAMES, MAX_ALGEBRAIC_DIM, MAX_STATE_DIM,
    STATE_NAMES,
};
pub use state::{
    P_AR_PUL, P_AR_SYS, P_C_PUL, P_C_SYS, P_LA, P_LV, P_RA, P_RV, P_VEN_PUL, P_VEN_SYS, Q_AR_PUL,
    Q_AR_SYS, Q_AV, Q_C_PUL, Q_C_SYS, Q_MV, Q_PV, Q_SH, Q_TV, Q_VEN_PUL, Q_VEN_SYS, V_LA, V_LV,
    V_RA, V_RV,
};

#[cfg(test)]
mod tests;

