//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulator, analyses and file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// State or parameter dimension does not match the model variant.
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    /// A parameter document or value violates a model invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A parameter path did not resolve.
    #[error("unknown parameter path `{0}`")]
    UnknownParameter(String),

    /// The integration produced a non-finite state component.
    #[error("simulation diverged: {variable} became non-finite at t = {time:.6} s")]
    Diverged { variable: String, time: f64 },

    /// A trace window request could not be satisfied.
    #[error("trace window error: {0}")]
    Window(String),

    /// Two traces are not on compatible grids.
    #[error("grid alignment error: {0}")]
    GridMismatch(String),

    /// A pressure-volume loop failed to close within tolerance.
    #[error("non-periodic trace: {0}")]
    NonPeriodicTrace(String),

    /// An output name expected by one side is missing on the other.
    #[error("schema error: {0}")]
    Schema(String),

    /// A requested output does not exist for this variant.
    #[error("missing variable: {0}")]
    MissingVariable(String),

    /// An argument is outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A calibration target value is zero, so the relative residual is undefined.
    #[error("zero-valued calibration target `{0}`")]
    ZeroTarget(String),

    /// File format / (de)serialization problems.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
