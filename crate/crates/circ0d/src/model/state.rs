//! State and algebraic vectors of the circulation ODE system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::params::Variant;

pub const MAX_STATE_DIM: usize = 14;
pub const MAX_ALGEBRAIC_DIM: usize = 11;

/// Component order of the state vector c1.
///
/// Indices 0..12 exist for both variants; 12 and 13 only for variant C.
pub const STATE_NAMES: [&str; MAX_STATE_DIM] = [
    "V_LA", "V_LV", "V_RA", "V_RV", "p_AR_SYS", "p_VEN_SYS", "p_AR_PUL", "p_VEN_PUL", "Q_AR_SYS",
    "Q_VEN_SYS", "Q_AR_PUL", "Q_VEN_PUL", "p_C_SYS", "p_C_PUL",
];

/// Component order of the algebraic vector c2 = W(t, c1).
///
/// Indices 0..8 exist for both variants; 8..11 only for variant C.
pub const ALGEBRAIC_NAMES: [&str; MAX_ALGEBRAIC_DIM] =
    ["p_LA", "p_LV", "p_RA", "p_RV", "Q_MV", "Q_AV", "Q_TV", "Q_PV", "Q_C_SYS", "Q_C_PUL", "Q_SH"];

// State component indices.
pub const V_LA: usize = 0;
pub const V_LV: usize = 1;
pub const V_RA: usize = 2;
pub const V_RV: usize = 3;
pub const P_AR_SYS: usize = 4;
pub const P_VEN_SYS: usize = 5;
pub const P_AR_PUL: usize = 6;
pub const P_VEN_PUL: usize = 7;
pub const Q_AR_SYS: usize = 8;
pub const Q_VEN_SYS: usize = 9;
pub const Q_AR_PUL: usize = 10;
pub const Q_VEN_PUL: usize = 11;
pub const P_C_SYS: usize = 12;
pub const P_C_PUL: usize = 13;

// Algebraic component indices.
pub const P_LA: usize = 0;
pub const P_LV: usize = 1;
pub const P_RA: usize = 2;
pub const P_RV: usize = 3;
pub const Q_MV: usize = 4;
pub const Q_AV: usize = 5;
pub const Q_TV: usize = 6;
pub const Q_PV: usize = 7;
pub const Q_C_SYS: usize = 8;
pub const Q_C_PUL: usize = 9;
pub const Q_SH: usize = 10;

/// State vector c1 of one model variant at one instant (fixed small storage).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    values: [f64; MAX_STATE_DIM],
    dim: usize,
}

impl StateVector {
    pub fn zeros(variant: Variant) -> Self {
        StateVector { values: [0.0; MAX_STATE_DIM], dim: variant.state_dim() }
    }

    pub fn from_slice(variant: Variant, slice: &[f64]) -> Result<Self> {
        if slice.len() != variant.state_dim() {
            return Err(Error::VariantMismatch(format!(
                "state has {} components, variant {} needs {}",
                slice.len(),
                variant,
                variant.state_dim()
            )));
        }
        let mut v = Self::zeros(variant);
        v.values[..slice.len()].copy_from_slice(slice);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values[..self.dim]
    }

    /// True when every component is finite.
    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    /// Index of the first non-finite component, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.as_slice().iter().position(|x| !x.is_finite())
    }

    /// y + h*k, used by the integrator stages.
    pub fn add_scaled(&self, h: f64, k: &StateVector) -> StateVector {
        let mut out = *self;
        for i in 0..self.dim {
            out.values[i] += h * k.values[i];
        }
        out
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl std::ops::IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

/// Algebraic vector c2 (chamber pressures, valve fluxes, capillary fluxes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicVector {
    values: [f64; MAX_ALGEBRAIC_DIM],
    dim: usize,
}

impl AlgebraicVector {
    pub fn zeros(variant: Variant) -> Self {
        AlgebraicVector { values: [0.0; MAX_ALGEBRAIC_DIM], dim: variant.algebraic_dim() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values[..self.dim]
    }
}

impl std::ops::Index<usize> for AlgebraicVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl std::ops::IndexMut<usize> for AlgebraicVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

/// Identifier of one time-dependent variable of a simulation: either a state
/// component or an algebraic component. 20 variables exist for variant NC,
/// 25 for variant C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarId {
    State(usize),
    Algebraic(usize),
}

impl VarId {
    pub fn name(self) -> &'static str {
        match self {
            VarId::State(i) => STATE_NAMES[i],
            VarId::Algebraic(i) => ALGEBRAIC_NAMES[i],
        }
    }

    /// All variables of a variant, state components first.
    pub fn all(variant: Variant) -> Vec<VarId> {
        let mut out = Vec::with_capacity(variant.state_dim() + variant.algebraic_dim());
        out.extend((0..variant.state_dim()).map(VarId::State));
        out.extend((0..variant.algebraic_dim()).map(VarId::Algebraic));
        out
    }

    /// Looks a variable up by its column name.
    pub fn by_name(variant: Variant, name: &str) -> Result<VarId> {
        VarId::all(variant)
            .into_iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| Error::MissingVariable(format!("{name} (variant {variant})")))
    }

    /// The 20 variables shared by both variants: chamber volumes and
    /// pressures, circulation pressures and fluxes, valve fluxes.
    pub fn shared() -> Vec<VarId> {
        let mut out: Vec<VarId> = (0..12).map(VarId::State).collect();
        out.extend((0..8).map(VarId::Algebraic));
        out
    }
}
