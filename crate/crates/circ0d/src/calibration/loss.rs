//! Relative residuals and the family of residual transforms f_0..f_8 that
//! define the calibration losses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of one residual transform, 0..=8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LossId(u8);

impl LossId {
    pub const ALL: [LossId; 9] = [
        LossId(0),
        LossId(1),
        LossId(2),
        LossId(3),
        LossId(4),
        LossId(5),
        LossId(6),
        LossId(7),
        LossId(8),
    ];

    pub fn new(id: u8) -> Result<Self> {
        if id > 8 {
            return Err(Error::Domain(format!("loss id {id} outside 0..=8")));
        }
        Ok(LossId(id))
    }

    pub fn id(self) -> u8 {
        self.0
    }
}

impl std::fmt::Display for LossId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// Relative residual |(q - d)/d| of a model value against its target.
pub fn residual(model_value: f64, target: f64) -> Result<f64> {
    if target == 0.0 {
        return Err(Error::ZeroTarget("<unnamed>".to_string()));
    }
    Ok(((model_value - target) / target).abs())
}

/// log(cosh(x)) without overflow: x - log 2 + log(1 + exp(-2x)) for x >= 0.
pub fn log_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
}

fn h(delta: f64) -> f64 {
    1.0 + 0.5 * (1.0 + delta * delta).ln()
}

/// Evaluates the residual transform f_r at delta >= 0.
pub fn loss_transform(r: LossId, delta: f64) -> f64 {
    let d = delta.abs();
    let g = log_cosh(d);
    match r.0 {
        0 => d * d,
        1 => g,
        2 => g * g,
        3 => d * g * g,
        4 => d * d * g * g,
        5 => d.powi(10) * g * g,
        6 => d.powf(1.5) * h(d),
        7 => {
            let p = d.powf(1.5);
            p / (1.0 + p) * h(d)
        }
        8 => d * d / (1.0 + d * d) * h(d),
        _ => unreachable!("LossId is validated"),
    }
}
