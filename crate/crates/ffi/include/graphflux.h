#ifndef GRAPHFLUX_H
#define GRAPHFLUX_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_INTERNAL = 1,
  GF_STATUS_INFEASIBLE = 2,
  GF_STATUS_UNBOUNDED = 3,
  GF_STATUS_INVALID_INPUT = 4,
  GF_STATUS_UNANCHORED = 5,
  GF_STATUS_NULL_POINTER = 6,
  GF_STATUS_BUFFER_TOO_SMALL = 7,
  GF_STATUS_PANIC = 8,
} GfStatus;

typedef enum GfField {
  // Optimal control vector `g`, one entry per control node (ascending node index).
  GF_FIELD_CONTROLS = 0,
  // Node potentials `u`.
  GF_FIELD_POTENTIALS = 1,
  // Signed edge fluxes `q`.
  GF_FIELD_FLUXES = 2,
  // Nodal balances `Φ`.
  GF_FIELD_BALANCES = 3,
} GfField;

typedef enum GfVerdict {
  GF_VERDICT_COMPACT = 0,
  GF_VERDICT_BOUNDED = 1,
  GF_VERDICT_BOUNDED_BELOW = 2,
  GF_VERDICT_DESCENT_RAY_FOUND = 3,
  GF_VERDICT_INCONCLUSIVE = 4,
} GfVerdict;

typedef struct GfNetwork GfNetwork;

typedef struct GfResult GfResult;

// Run parameters. Obtain defaults from [`gf_config_default`].
typedef struct GfConfig {
  double phi_max;
  double eps;
  // Nonzero: fix one node per unanchored component at `gauge_value`.
  int32_t gauge_auto;
  double gauge_value;
  // Nonzero: apply `[lower, upper]` to every control.
  int32_t has_bounds;
  double lower;
  double upper;
  double tol_feas;
  double tol_opt;
} GfConfig;

// Scalar validation metrics. Extrema over empty node sets are NaN.
typedef struct GfDiagnostics {
  double objective;
  uint64_t iterations;
  double max_phi_in;
  double min_phi_out;
  double max_edge_sign_violation;
  double global_conservation;
  double max_interior_abs_phi;
  double amount_in;
  double amount_out;
  double in_out_mismatch;
  double max_component_balance;
  enum GfVerdict verdict;
} GfDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct GfConfig gf_config_default(void);

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next `gf_*` call on the same thread.
const char *gf_last_error_message(void);

// Parses a network JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum GfStatus gf_network_from_json(const char *json, struct GfNetwork **out);

// Reads and parses a network file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum GfStatus gf_network_from_path(const char *path, struct GfNetwork **out);

// # Safety
// `net` must come from `gf_network_from_*` and not be freed twice; null is ignored.
void gf_network_free(struct GfNetwork *net);

// # Safety
// `net` must be a live handle; `nodes` and `edges` must be writable.
enum GfStatus gf_network_size(const struct GfNetwork *net, uintptr_t *nodes, uintptr_t *edges);

// Fixes the potential of the node with external id `id`.
//
// # Safety
// `net` must be a live handle; `id` a NUL-terminated string.
enum GfStatus gf_network_set_fixed(struct GfNetwork *net, const char *id, double value);

// Runs the full pipeline. A null `config` uses the defaults.
//
// # Safety
// `net` must be a live handle, `config` null or valid, `out` writable.
enum GfStatus gf_solve(const struct GfNetwork *net,
                       const struct GfConfig *config,
                       struct GfResult **out);

// # Safety
// `res` must come from `gf_solve` and not be freed twice; null is ignored.
void gf_result_free(struct GfResult *res);

// Copies a result vector into `buf`. `len_out` always receives the full
// length; when `buf_len` is too small nothing is copied and
// `BufferTooSmall` is returned. Pass `buf = NULL` to query the length.
//
// # Safety
// `res` must be a live handle, `buf` valid for `buf_len` writes or null,
// `len_out` writable.
enum GfStatus gf_result_copy(const struct GfResult *res,
                             enum GfField field,
                             double *buf,
                             uintptr_t buf_len,
                             uintptr_t *len_out);

// # Safety
// `res` must be a live handle; `out` writable.
enum GfStatus gf_result_diagnostics(const struct GfResult *res, struct GfDiagnostics *out);

// Library version as a static NUL-terminated string.
const char *gf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHFLUX_H */
