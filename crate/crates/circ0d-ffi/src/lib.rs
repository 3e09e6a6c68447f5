//! C ABI for the circ0d simulator: opaque handles, status codes, and
//! string-based exchange (TOML parameter documents, JSON reports, CSV
//! traces). The generated header lives in `include/circ0d.h`.
//!
//! Conventions:
//! - functions returning `Circ0dStatus` write results through out-pointers
//!   and return `Ok` (0) on success;
//! - every returned string is owned by the caller and must be released
//!   with `circ0d_string_free`;
//! - `circ0d_last_error` describes the most recent failure on the calling
//!   thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::ptr;

use circ0d::engine::{default_initial_state, simulate, IntegrationConfig, SimulationTrace};
use circ0d::error::Error;
use circ0d::model::{ParameterSet, VarId, Variant};
use circ0d::observables::{compute_outputs, range_check, BodyMetrics, HealthyRanges};
use circ0d::scenarios::{builtin, Condition, Severity};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Circ0dStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Format = 3,
    VariantMismatch = 4,
    UnknownParameter = 5,
    Domain = 6,
    Diverged = 7,
    Window = 8,
    Other = 9,
}

/// Model variant selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Circ0dVariant {
    NonCapillary = 0,
    Capillary = 1,
}

impl From<Circ0dVariant> for Variant {
    fn from(v: Circ0dVariant) -> Variant {
        match v {
            Circ0dVariant::NonCapillary => Variant::NonCapillary,
            Circ0dVariant::Capillary => Variant::Capillary,
        }
    }
}

/// Hypertension condition selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Circ0dCondition {
    Systemic = 0,
    Pulmonary = 1,
    Renovascular = 2,
}

/// Severity selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Circ0dSeverity {
    Mild = 0,
    Moderate = 1,
    Severe = 2,
}

/// Integration controls mirrored into the C ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Circ0dSimConfig {
    /// Timestep (s).
    pub dt: c_double,
    /// Beat budget.
    pub max_heartbeats: usize,
    /// Limit-cycle residual tolerance.
    pub convergence_tol: c_double,
    /// Beats retained in the trace.
    pub heartbeats_to_keep: usize,
}

/// Opaque parameter-set handle.
pub struct Circ0dParams(ParameterSet);

/// Opaque simulation-trace handle.
pub struct Circ0dTrace(SimulationTrace);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> Circ0dStatus {
    match err {
        Error::VariantMismatch(_) => Circ0dStatus::VariantMismatch,
        Error::UnknownParameter(_) => Circ0dStatus::UnknownParameter,
        Error::InvalidParameter(_) | Error::Format(_) => Circ0dStatus::Format,
        Error::Diverged { .. } => Circ0dStatus::Diverged,
        Error::Window(_) | Error::GridMismatch(_) | Error::NonPeriodicTrace(_) => {
            Circ0dStatus::Window
        }
        Error::Domain(_) | Error::ZeroTarget(_) => Circ0dStatus::Domain,
        _ => Circ0dStatus::Other,
    }
}

fn fail(err: Error) -> Circ0dStatus {
    set_error(&err.to_string());
    status_of(&err)
}

unsafe fn c_str<'a>(text: *const c_char) -> Result<&'a str, Circ0dStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(Circ0dStatus::NullArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        Circ0dStatus::InvalidUtf8
    })
}

fn owned_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the most recent error on this thread. Borrowed; valid until
/// the next failing call from the same thread.
#[no_mangle]
pub extern "C" fn circ0d_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn circ0d_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library.
///
/// # Safety
/// `text` must come from a circ0d function and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn circ0d_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// The built-in healthy parameter set of a variant. Never fails.
#[no_mangle]
pub extern "C" fn circ0d_params_healthy(variant: Circ0dVariant) -> *mut Circ0dParams {
    Box::into_raw(Box::new(Circ0dParams(ParameterSet::healthy(variant.into()))))
}

/// Parses and validates a TOML parameter document.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn circ0d_params_from_toml(
    text: *const c_char,
    out: *mut *mut Circ0dParams,
) -> Circ0dStatus {
    if out.is_null() {
        set_error("null out pointer");
        return Circ0dStatus::NullArgument;
    }
    let text = match c_str(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match ParameterSet::from_toml(text) {
        Ok(params) => {
            *out = Box::into_raw(Box::new(Circ0dParams(params)));
            Circ0dStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Serializes a parameter set to its TOML document.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn circ0d_params_to_toml(params: *const Circ0dParams) -> *mut c_char {
    if params.is_null() {
        set_error("null params handle");
        return ptr::null_mut();
    }
    owned_c_string((*params).0.to_toml())
}

/// Deep-copies a parameter handle.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn circ0d_params_clone(params: *const Circ0dParams) -> *mut Circ0dParams {
    if params.is_null() {
        set_error("null params handle");
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(Circ0dParams((*params).0.clone())))
}

/// Releases a parameter handle.
///
/// # Safety
/// `params` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn circ0d_params_free(params: *mut Circ0dParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Reads one value by its dotted parameter path.
///
/// # Safety
/// All pointers must be valid; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn circ0d_params_get(
    params: *const Circ0dParams,
    path: *const c_char,
    out: *mut c_double,
) -> Circ0dStatus {
    if params.is_null() || out.is_null() {
        set_error("null argument");
        return Circ0dStatus::NullArgument;
    }
    let path = match c_str(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match (*params).0.get_path(path) {
        Ok(v) => {
            *out = v;
            Circ0dStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Writes one value by its dotted parameter path.
///
/// # Safety
/// `params` must be a live mutable handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn circ0d_params_set(
    params: *mut Circ0dParams,
    path: *const c_char,
    value: c_double,
) -> Circ0dStatus {
    if params.is_null() {
        set_error("null params handle");
        return Circ0dStatus::NullArgument;
    }
    let path = match c_str(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match (*params).0.set_path(path, value) {
        Ok(()) => Circ0dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Applies a built-in hypertension scenario, producing a new handle.
///
/// # Safety
/// `params` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn circ0d_scenario_apply(
    params: *const Circ0dParams,
    condition: Circ0dCondition,
    severity: Circ0dSeverity,
    out: *mut *mut Circ0dParams,
) -> Circ0dStatus {
    if params.is_null() || out.is_null() {
        set_error("null argument");
        return Circ0dStatus::NullArgument;
    }
    let condition = match condition {
        Circ0dCondition::Systemic => Condition::Systemic,
        Circ0dCondition::Pulmonary => Condition::Pulmonary,
        Circ0dCondition::Renovascular => Condition::Renovascular,
    };
    let severity = match severity {
        Circ0dSeverity::Mild => Severity::Mild,
        Circ0dSeverity::Moderate => Severity::Moderate,
        Circ0dSeverity::Severe => Severity::Severe,
    };
    match builtin(condition, severity).apply(&(*params).0) {
        Ok(modified) => {
            *out = Box::into_raw(Box::new(Circ0dParams(modified)));
            Circ0dStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Default integration controls for the parameter set's variant.
///
/// # Safety
/// `params` must be a live handle (NULL yields the NC defaults).
#[no_mangle]
pub unsafe extern "C" fn circ0d_sim_config_default(
    params: *const Circ0dParams,
) -> Circ0dSimConfig {
    let variant =
        if params.is_null() { Variant::NonCapillary } else { (*params).0.variant };
    let cfg = IntegrationConfig::default_for(variant);
    Circ0dSimConfig {
        dt: cfg.dt,
        max_heartbeats: cfg.max_heartbeats,
        convergence_tol: cfg.convergence_tol,
        heartbeats_to_keep: cfg.heartbeats_to_keep,
    }
}

/// Integrates to the limit cycle from the built-in initial state.
/// `config` may be NULL for the per-variant defaults.
///
/// # Safety
/// `params` must be a live handle; `out` valid; `config` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn circ0d_simulate(
    params: *const Circ0dParams,
    config: *const Circ0dSimConfig,
    out: *mut *mut Circ0dTrace,
) -> Circ0dStatus {
    if params.is_null() || out.is_null() {
        set_error("null argument");
        return Circ0dStatus::NullArgument;
    }
    let p = &(*params).0;
    let mut cfg = IntegrationConfig::default_for(p.variant);
    if !config.is_null() {
        let c = &*config;
        cfg.dt = c.dt;
        cfg.max_heartbeats = c.max_heartbeats;
        cfg.convergence_tol = c.convergence_tol;
        cfg.heartbeats_to_keep = c.heartbeats_to_keep;
    }
    match simulate(p, &default_initial_state(p), &cfg) {
        Ok(trace) => {
            *out = Box::into_raw(Box::new(Circ0dTrace(trace)));
            Circ0dStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of grid nodes in the trace.
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn circ0d_trace_len(trace: *const Circ0dTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).0.len()
}

/// Whether the limit-cycle residual met the tolerance (1 = yes).
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn circ0d_trace_converged(trace: *const Circ0dTrace) -> c_int {
    if trace.is_null() {
        return 0;
    }
    (*trace).0.converged as c_int
}

/// Copies one named variable (or "time") into the caller's buffer, which
/// must hold at least `circ0d_trace_len` doubles.
///
/// # Safety
/// `trace` live; `name` NUL-terminated; `buffer` at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn circ0d_trace_series(
    trace: *const Circ0dTrace,
    name: *const c_char,
    buffer: *mut c_double,
    len: usize,
) -> Circ0dStatus {
    if trace.is_null() || buffer.is_null() {
        set_error("null argument");
        return Circ0dStatus::NullArgument;
    }
    let name = match c_str(name) {
        Ok(n) => n,
        Err(status) => return status,
    };
    let t = &(*trace).0;
    if len < t.len() {
        set_error("buffer shorter than the trace");
        return Circ0dStatus::Domain;
    }
    let series = if name == "time" {
        t.time.clone()
    } else {
        match VarId::by_name(t.variant, name) {
            Ok(var) => t.series(var),
            Err(e) => return fail(e),
        }
    };
    ptr::copy_nonoverlapping(series.as_ptr(), buffer, series.len());
    Circ0dStatus::Ok
}

/// Renders the whole trace as CSV.
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn circ0d_trace_csv(trace: *const Circ0dTrace) -> *mut c_char {
    if trace.is_null() {
        set_error("null trace handle");
        return ptr::null_mut();
    }
    let mut out = Vec::new();
    if let Err(e) = (*trace).0.write_csv(&mut out) {
        fail(e);
        return ptr::null_mut();
    }
    owned_c_string(String::from_utf8(out).unwrap_or_default())
}

/// Computes the time-independent outputs of the final heartbeat and returns
/// them as flat JSON keyed by output name. `bsa <= 0` selects the
/// per-variant default body surface area.
///
/// # Safety
/// `trace` and `params` live handles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn circ0d_outputs_json(
    trace: *const Circ0dTrace,
    params: *const Circ0dParams,
    bsa: c_double,
    out: *mut *mut c_char,
) -> Circ0dStatus {
    if trace.is_null() || params.is_null() || out.is_null() {
        set_error("null argument");
        return Circ0dStatus::NullArgument;
    }
    let p = &(*params).0;
    let body = if bsa > 0.0 { BodyMetrics { bsa } } else { BodyMetrics::default_for(p.variant) };
    let result = (*trace).0.last_beat().and_then(|last| compute_outputs(&last, p, &body));
    match result {
        Ok(report) => {
            *out = owned_c_string(report.to_json());
            Circ0dStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Checks the final-beat outputs against the built-in healthy ranges and
/// returns the verdict JSON. `bsa <= 0` selects the per-variant default.
///
/// # Safety
/// `trace` and `params` live handles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn circ0d_verdicts_json(
    trace: *const Circ0dTrace,
    params: *const Circ0dParams,
    bsa: c_double,
    out: *mut *mut c_char,
) -> Circ0dStatus {
    if trace.is_null() || params.is_null() || out.is_null() {
        set_error("null argument");
        return Circ0dStatus::NullArgument;
    }
    let p = &(*params).0;
    let body = if bsa > 0.0 { BodyMetrics { bsa } } else { BodyMetrics::default_for(p.variant) };
    let result = (*trace)
        .0
        .last_beat()
        .and_then(|last| compute_outputs(&last, p, &body))
        .and_then(|report| range_check(&report, &HealthyRanges::builtin(p.variant)));
    match result {
        Ok(verdicts) => {
            *out = owned_c_string(verdicts.to_json());
            Circ0dStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a trace handle.
///
/// # Safety
/// `trace` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn circ0d_trace_free(trace: *mut Circ0dTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
