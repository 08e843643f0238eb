#ifndef QTRAJ_H
#define QTRAJ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QtrajStatus {
  QTRAJ_STATUS_OK = 0,
  QTRAJ_STATUS_NULL_POINTER = 1,
  QTRAJ_STATUS_INVALID_ARGUMENT = 2,
  QTRAJ_STATUS_NODE_SINGULARITY = 3,
  QTRAJ_STATUS_SLICE_OUT_OF_RANGE = 4,
  QTRAJ_STATUS_BUFFER_TOO_SMALL = 5,
  QTRAJ_STATUS_IO = 6,
  QTRAJ_STATUS_INTERNAL = 7,
} QtrajStatus;

typedef enum QtrajTheory {
  QTRAJ_THEORY_DBB = 0,
  QTRAJ_THEORY_REVISED = 1,
} QtrajTheory;

typedef enum QtrajObservable {
  QTRAJ_OBSERVABLE_POSITION = 0,
  QTRAJ_OBSERVABLE_MOMENTUM = 1,
} QtrajObservable;

/**
 * A completed trajectory ensemble.
 */
typedef struct QtrajEnsemble QtrajEnsemble;

/**
 * Slit geometry and units.
 */
typedef struct QtrajParams QtrajParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL,
 * or 0 if there is no message.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t qtraj_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qtraj_version(void);

/**
 * Create parameters: half slit separation and packet width in nm, mass in
 * electron masses.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum QtrajStatus qtraj_params_new(double x_half_nm,
                                  double sigma_nm,
                                  double mass_me,
                                  struct QtrajParams **out);

/**
 * # Safety
 * `params` must be null or a handle from `qtraj_params_new` not yet freed.
 */
void qtraj_params_free(struct QtrajParams *params);

/**
 * ψ(x, t) as real and imaginary parts.
 *
 * # Safety
 * `params` must be a live handle; `re` and `im` valid for writes.
 */
enum QtrajStatus qtraj_psi(const struct QtrajParams *params,
                           double x,
                           double t,
                           double *re,
                           double *im);

/**
 * |ψ(x, t)|².
 *
 * # Safety
 * `params` must be a live handle; `out` valid for a write.
 */
enum QtrajStatus qtraj_rho(const struct QtrajParams *params, double x, double t, double *out);

/**
 * de Broglie–Bohm momentum field.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for a write.
 */
enum QtrajStatus qtraj_p_bb(const struct QtrajParams *params, double x, double t, double *out);

/**
 * Revised momentum field anchored at (x0, t0) with momentum p0.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for a write.
 */
enum QtrajStatus qtraj_p_revised(const struct QtrajParams *params,
                                 double x,
                                 double t,
                                 double x0,
                                 double p0,
                                 double t0,
                                 double *out);

/**
 * Momentum-space density of the initial superposition.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for a write.
 */
enum QtrajStatus qtraj_momentum_density(const struct QtrajParams *params, double p, double *out);

/**
 * Integrate `n_traj` trajectories from t = 0 to `t_final_ps` with base step
 * `dt_ps`. Other settings take their library defaults.
 *
 * # Safety
 * `params` must be a live handle; `out` valid for a pointer write.
 */
enum QtrajStatus qtraj_ensemble_run(const struct QtrajParams *params,
                                    enum QtrajTheory theory_kind,
                                    size_t n_traj,
                                    uint64_t seed,
                                    double t_final_ps,
                                    double dt_ps,
                                    struct QtrajEnsemble **out);

/**
 * # Safety
 * `ensemble` must be null or a handle from `qtraj_ensemble_run` not yet freed.
 */
void qtraj_ensemble_free(struct QtrajEnsemble *ensemble);

/**
 * Number of trajectories.
 *
 * # Safety
 * `ensemble` must be a live handle; `out` valid for a write.
 */
enum QtrajStatus qtraj_ensemble_len(const struct QtrajEnsemble *ensemble, size_t *out);

/**
 * Trajectories that completed, left the domain, or stalled.
 *
 * # Safety
 * `ensemble` must be a live handle; the outputs valid for writes.
 */
enum QtrajStatus qtraj_ensemble_status_counts(const struct QtrajEnsemble *ensemble,
                                              size_t *completed,
                                              size_t *exited_domain,
                                              size_t *node_stalled);

/**
 * Observable values of all contributing trajectories at time `t`.
 *
 * `*len` receives the number of values. If it exceeds `capacity`, nothing is
 * copied and `BufferTooSmall` is returned; `values` may be null to query the
 * size.
 *
 * # Safety
 * `ensemble` must be a live handle; `values` null or valid for `capacity`
 * doubles; `len` valid for a write.
 */
enum QtrajStatus qtraj_ensemble_slice(const struct QtrajEnsemble *ensemble,
                                      double t,
                                      enum QtrajObservable observable,
                                      double *values,
                                      size_t capacity,
                                      size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTRAJ_H */
