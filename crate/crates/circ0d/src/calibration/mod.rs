//! Loss-function-driven parameter calibration of the non-capillary model.

mod lbfgsb;
mod loss;
mod problem;
mod study;

pub use lbfgsb::{minimize_bounded, OptimOptions, OptimOutcome, StopReason};
pub use loss::{log_cosh, loss_transform, residual, LossId};
pub use problem::{
    calibrate, calibration_target_names, evaluate_loss, CalibrationProblem, CalibrationResult,
    TargetData, TargetEntry, DIVERGENCE_PENALTY,
};
pub use study::{loss_study, scenario_targets, workflow_0d, StudyRow, StudySetup, LV_FROZEN_PATHS};
