/* C interface of the circ0d closed-loop cardiocirculatory simulator. */

#ifndef CIRC0D_H
#define CIRC0D_H

/* Generated by cbindgen from crates/circ0d-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Model variant selector.
typedef enum Circ0dVariant {
  CIRC0D_VARIANT_NON_CAPILLARY = 0,
  CIRC0D_VARIANT_CAPILLARY = 1,
} Circ0dVariant;

// Status codes returned by every fallible entry point.
typedef enum Circ0dStatus {
  CIRC0D_STATUS_OK = 0,
  CIRC0D_STATUS_NULL_ARGUMENT = 1,
  CIRC0D_STATUS_INVALID_UTF8 = 2,
  CIRC0D_STATUS_FORMAT = 3,
  CIRC0D_STATUS_VARIANT_MISMATCH = 4,
  CIRC0D_STATUS_UNKNOWN_PARAMETER = 5,
  CIRC0D_STATUS_DOMAIN = 6,
  CIRC0D_STATUS_DIVERGED = 7,
  CIRC0D_STATUS_WINDOW = 8,
  CIRC0D_STATUS_OTHER = 9,
} Circ0dStatus;

// Hypertension condition selector.
typedef enum Circ0dCondition {
  CIRC0D_CONDITION_SYSTEMIC = 0,
  CIRC0D_CONDITION_PULMONARY = 1,
  CIRC0D_CONDITION_RENOVASCULAR = 2,
} Circ0dCondition;

// Severity selector.
typedef enum Circ0dSeverity {
  CIRC0D_SEVERITY_MILD = 0,
  CIRC0D_SEVERITY_MODERATE = 1,
  CIRC0D_SEVERITY_SEVERE = 2,
} Circ0dSeverity;

// Opaque parameter-set handle.
typedef struct Circ0dParams Circ0dParams;

// Opaque simulation-trace handle.
typedef struct Circ0dTrace Circ0dTrace;

// Integration controls mirrored into the C ABI.
typedef struct Circ0dSimConfig {
  // Timestep (s).
  double dt;
  // Beat budget.
  size_t max_heartbeats;
  // Limit-cycle residual tolerance.
  double convergence_tol;
  // Beats retained in the trace.
  size_t heartbeats_to_keep;
} Circ0dSimConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent error on this thread. Borrowed; valid until
// the next failing call from the same thread.
const char *circ0d_last_error(void);

// Library version as a static string.
const char *circ0d_version(void);

// Releases a string returned by this library.
//
// # Safety
// `text` must come from a circ0d function and not be freed twice.
void circ0d_string_free(char *text);

// The built-in healthy parameter set of a variant. Never fails.
struct Circ0dParams *circ0d_params_healthy(enum Circ0dVariant variant);

// Parses and validates a TOML parameter document.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be valid.
enum Circ0dStatus circ0d_params_from_toml(const char *text, struct Circ0dParams **out);

// Serializes a parameter set to its TOML document.
//
// # Safety
// `params` must be a live handle.
char *circ0d_params_to_toml(const struct Circ0dParams *params);

// Deep-copies a parameter handle.
//
// # Safety
// `params` must be a live handle.
struct Circ0dParams *circ0d_params_clone(const struct Circ0dParams *params);

// Releases a parameter handle.
//
// # Safety
// `params` must come from this library and not be freed twice.
void circ0d_params_free(struct Circ0dParams *params);

// Reads one value by its dotted parameter path.
//
// # Safety
// All pointers must be valid; `path` NUL-terminated.
enum Circ0dStatus circ0d_params_get(const struct Circ0dParams *params,
                                    const char *path,
                                    double *out);

// Writes one value by its dotted parameter path.
//
// # Safety
// `params` must be a live mutable handle; `path` NUL-terminated.
enum Circ0dStatus circ0d_params_set(struct Circ0dParams *params, const char *path, double value);

// Applies a built-in hypertension scenario, producing a new handle.
//
// # Safety
// `params` must be a live handle; `out` valid.
enum Circ0dStatus circ0d_scenario_apply(const struct Circ0dParams *params,
                                        enum Circ0dCondition condition,
                                        enum Circ0dSeverity severity,
                                        struct Circ0dParams **out);

// Default integration controls for the parameter set's variant.
//
// # Safety
// `params` must be a live handle (NULL yields the NC defaults).
struct Circ0dSimConfig circ0d_sim_config_default(const struct Circ0dParams *params);

// Integrates to the limit cycle from the built-in initial state.
// `config` may be NULL for the per-variant defaults.
//
// # Safety
// `params` must be a live handle; `out` valid; `config` NULL or valid.
enum Circ0dStatus circ0d_simulate(const struct Circ0dParams *params,
                                  const struct Circ0dSimConfig *config,
                                  struct Circ0dTrace **out);

// Number of grid nodes in the trace.
//
// # Safety
// `trace` must be a live handle.
size_t circ0d_trace_len(const struct Circ0dTrace *trace);

// Whether the limit-cycle residual met the tolerance (1 = yes).
//
// # Safety
// `trace` must be a live handle.
int circ0d_trace_converged(const struct Circ0dTrace *trace);

// Copies one named variable (or "time") into the caller's buffer, which
// must hold at least `circ0d_trace_len` doubles.
//
// # Safety
// `trace` live; `name` NUL-terminated; `buffer` at least `len` doubles.
enum Circ0dStatus circ0d_trace_series(const struct Circ0dTrace *trace,
                                      const char *name,
                                      double *buffer,
                                      size_t len);

// Renders the whole trace as CSV.
//
// # Safety
// `trace` must be a live handle.
char *circ0d_trace_csv(const struct Circ0dTrace *trace);

// Computes the time-independent outputs of the final heartbeat and returns
// them as flat JSON keyed by output name. `bsa <= 0` selects the
// per-variant default body surface area.
//
// # Safety
// `trace` and `params` live handles; `out` valid.
enum Circ0dStatus circ0d_outputs_json(const struct Circ0dTrace *trace,
                                      const struct Circ0dParams *params,
                                      double bsa,
                                      char **out);

// Checks the final-beat outputs against the built-in healthy ranges and
// returns the verdict JSON. `bsa <= 0` selects the per-variant default.
//
// # Safety
// `trace` and `params` live handles; `out` valid.
enum Circ0dStatus circ0d_verdicts_json(const struct Circ0dTrace *trace,
                                       const struct Circ0dParams *params,
                                       double bsa,
                                       char **out);

// Releases a trace handle.
//
// # Safety
// `trace` must come from this library and not be freed twice.
void circ0d_trace_free(struct Circ0dTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRC0D_H */
