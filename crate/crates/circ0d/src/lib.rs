//! Closed-loop 0D cardiocirculatory simulator.
//!
//! Two lumped-parameter circulation variants (with and without a capillary
//! network) are integrated to their periodic limit cycle; on top of the
//! simulator sit hypertension scenario generation, global (Sobol/Saltelli)
//! and group sensitivity analysis, loss-function-driven parameter
//! calibration, and greedy cross-model parameter matching.
//!
//! Quantities use the clinical unit system throughout: mmHg, mL, s.

pub mod calibration;
pub mod cli;
pub mod engine;
pub mod error;
pub mod matching;
pub mod model;
pub mod observables;
pub mod scenarios;
pub mod sensitivity;

pub use error::{Error, Result};
