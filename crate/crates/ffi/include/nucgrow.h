#ifndef NUCGROW_H
#define NUCGROW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NgStatus {
  NG_STATUS_OK = 0,
  NG_STATUS_NULL = 1,
  NG_STATUS_INVALID_ARGUMENT = 2,
  NG_STATUS_BUDGET = 3,
  NG_STATUS_IO = 4,
  NG_STATUS_PANIC = 5,
} NgStatus;

typedef enum NgFlavor {
  NG_FLAVOR_DS = 0,
  NG_FLAVOR_KS = 1,
  NG_FLAVOR_MODIFIED_KS = 2,
} NgFlavor;

typedef enum NgStopKind {
  NG_STOP_KIND_ORIGIN_INFECTED = 0,
  NG_STOP_KIND_SQUARE_FILLED = 1,
  NG_STOP_KIND_RECT_REACHED = 2,
  NG_STOP_KIND_TIME_HORIZON = 3,
  NG_STOP_KIND_BOX_FILLED = 4,
} NgStopKind;

typedef enum NgCause {
  NG_CAUSE_NUCLEATION = 0,
  NG_CAUSE_ONE_NEIGHBOUR = 1,
  NG_CAUSE_TWO_NEIGHBOUR = 2,
  NG_CAUSE_INSTANTANEOUS = 3,
} NgCause;

typedef enum NgRegime {
  NG_REGIME_A = 0,
  NG_REGIME_B = 1,
  NG_REGIME_C = 2,
  NG_REGIME_BOUNDARY = 3,
} NgRegime;

/**
 * Droplet observables of one KS run.
 */
typedef struct NgDroplet NgDroplet;

/**
 * Process parameters on the box `S(halfwidth)`.
 */
typedef struct NgParams NgParams;

/**
 * A finite set of sites, in sorted order.
 */
typedef struct NgSites NgSites;

/**
 * A recorded event trace.
 */
typedef struct NgTrace NgTrace;

/**
 * A stop rule. `arg` is `m` for the square and rectangle rules and the
 * horizon for `TimeHorizon`; it is ignored otherwise.
 */
typedef struct NgStopRule {
  enum NgStopKind kind;
  double arg;
} NgStopRule;

typedef struct NgEvent {
  double t;
  int64_t x;
  int64_t y;
  enum NgCause cause;
} NgEvent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ng_version(void);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ng_last_error(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum NgStatus ng_params_new(double n,
                            double k,
                            uint64_t halfwidth,
                            enum NgFlavor flavor_,
                            struct NgParams **out_params);

/**
 * # Safety
 * `p` must be null or a handle from [`ng_params_new`] not yet freed.
 */
void ng_params_free(struct NgParams *p);

/**
 * Time the origin is first infected under DS dynamics.
 *
 * # Safety
 * `params` must be a live handle and `out_tau` valid for writes.
 */
enum NgStatus ng_relaxation_time(const struct NgParams *params,
                                 uint64_t seed,
                                 uint64_t budget,
                                 double *out_tau);

/**
 * Run the chain from the `len` sites in `xy` (pairs `x, y`) until `stop`.
 *
 * # Safety
 * `params` must be a live handle, `xy` must hold `2·len` values (or be
 * null with `len = 0`), and `out_trace` must be valid for writes.
 */
enum NgStatus ng_simulate(const struct NgParams *params,
                          const int64_t *xy,
                          size_t len,
                          struct NgStopRule stop,
                          uint64_t seed,
                          uint64_t budget,
                          struct NgTrace **out_trace);

/**
 * # Safety
 * `trace` must be a live handle and `out_len` valid for writes.
 */
enum NgStatus ng_trace_len(const struct NgTrace *trace, size_t *out_len);

/**
 * Final time of the run.
 *
 * # Safety
 * `trace` must be a live handle and `out_t` valid for writes.
 */
enum NgStatus ng_trace_end_time(const struct NgTrace *trace, double *out_t);

/**
 * # Safety
 * `trace` must be a live handle and `out_event` valid for writes.
 */
enum NgStatus ng_trace_event(const struct NgTrace *trace, size_t index, struct NgEvent *out_event);

/**
 * Write the trace as JSON lines to `path`.
 *
 * # Safety
 * `trace` must be a live handle and `path` a NUL-terminated string.
 */
enum NgStatus ng_trace_write_jsonl(const struct NgTrace *trace, const char *path);

/**
 * # Safety
 * `trace` must be null or a live handle.
 */
void ng_trace_free(struct NgTrace *trace);

/**
 * KS growth from the origin until `S(m)` is full.
 *
 * # Safety
 * `params` must be a live handle and `out_droplet` valid for writes.
 */
enum NgStatus ng_droplet_times(const struct NgParams *params,
                               uint64_t m,
                               uint64_t seed,
                               uint64_t budget,
                               struct NgDroplet **out_droplet);

/**
 * # Safety
 * `d` must be a live handle and `out_t` valid for writes.
 */
enum NgStatus ng_droplet_t_minus(const struct NgDroplet *d, uint64_t m, double *out_t);

/**
 * # Safety
 * `d` must be a live handle and `out_t` valid for writes.
 */
enum NgStatus ng_droplet_t_plus(const struct NgDroplet *d, uint64_t m, double *out_t);

/**
 * # Safety
 * `d` must be a live handle and `out_t` valid for writes.
 */
enum NgStatus ng_droplet_t_rect(const struct NgDroplet *d, uint64_t m, double *out_t);

/**
 * # Safety
 * `d` must be null or a live handle.
 */
void ng_droplet_free(struct NgDroplet *d);

/**
 * 2-neighbour bootstrap closure of the `len` sites in `xy` inside the box
 * `[x0, x1] × [y0, y1]`.
 *
 * # Safety
 * `xy` must hold `2·len` values (or be null with `len = 0`) and
 * `out_sites` must be valid for writes.
 */
enum NgStatus ng_closure(const int64_t *xy,
                         size_t len,
                         int64_t x0,
                         int64_t x1,
                         int64_t y0,
                         int64_t y1,
                         struct NgSites **out_sites);

/**
 * # Safety
 * `sites` must be a live handle and `out_len` valid for writes.
 */
enum NgStatus ng_sites_len(const struct NgSites *sites, size_t *out_len);

/**
 * # Safety
 * `sites` must be a live handle; `out_x` and `out_y` valid for writes.
 */
enum NgStatus ng_sites_get(const struct NgSites *sites,
                           size_t index,
                           int64_t *out_x,
                           int64_t *out_y);

/**
 * # Safety
 * `sites` must be null or a live handle.
 */
void ng_sites_free(struct NgSites *sites);

/**
 * `P(X_1 + … + X_s ≤ t)` for i.i.d. exponentials of mean `lambda`.
 *
 * # Safety
 * `out_p` must be valid for writes.
 */
enum NgStatus ng_exp_sum_tail(uint64_t s, double lambda, double t, double *out_p);

/**
 * Regime and predicted relaxation time for `(n, k)`.
 *
 * # Safety
 * `out_regime` and `out_tau` must be valid for writes.
 */
enum NgStatus ng_predict_tau(double n, double k, enum NgRegime *out_regime, double *out_tau);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NUCGROW_H */
