#ifndef KICKED_DIRAC_H
#define KICKED_DIRAC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KdModel {
  KD_MODEL_DIRAC_SPINOR = 0,
  KD_MODEL_MARYLAND_PLUS = 1,
  KD_MODEL_MARYLAND_MINUS = 2,
  KD_MODEL_SPINLESS_RELATIVISTIC = 3,
  KD_MODEL_QKR = 4,
} KdModel;

// Result code of every fallible call.
typedef enum KdStatus {
  KD_STATUS_OK = 0,
  KD_STATUS_NULL_POINTER = 1,
  KD_STATUS_INVALID_ARGUMENT = 2,
  KD_STATUS_CONFIG = 3,
  KD_STATUS_NO_CROSSING = 4,
  KD_STATUS_BUFFER_TOO_SMALL = 5,
  KD_STATUS_INTERNAL = 6,
  KD_STATUS_PANIC = 7,
} KdStatus;

// Opaque simulation handle.
typedef struct KdSimulation KdSimulation;

typedef struct KdParams {
  double alpha;
  double mass;
  double kick;
  double period;
  // Power of two, at least 4.
  size_t n_modes;
  // A `KdModel` value.
  uint32_t model;
} KdParams;

// Gaussian packet; the spinor is ignored by scalar models.
typedef struct KdGaussian {
  double p0;
  double delta_p;
  double chi_re[2];
  double chi_im[2];
} KdGaussian;

// Snapshot of the current state. `theta_mean` is NaN when undefined;
// `p_plus`/`p_minus` are NaN for scalar models.
typedef struct KdObservables {
  uint64_t t;
  double p_mean;
  double p_spread;
  double theta_mean;
  double p_plus;
  double p_minus;
} KdObservables;

typedef struct KdEffectiveParams {
  double amplitude;
  double phase_shift;
  double bloch_period;
  double osc_amplitude;
} KdEffectiveParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a simulation at `t = 0`. On success `*out` owns a new handle.
//
// # Safety
// `params` and `gaussian` must be valid for reads; `out` must be valid for writes.
enum KdStatus kd_simulation_new(const struct KdParams *params,
                                const struct KdGaussian *gaussian,
                                struct KdSimulation **out);

// Releases a handle; null is ignored.
//
// # Safety
// `sim` must be null or a handle from [`kd_simulation_new`] not yet freed.
void kd_simulation_free(struct KdSimulation *sim);

// Applies `n_kicks` Floquet periods.
//
// # Safety
// `sim` must be a live handle not used concurrently from another thread.
enum KdStatus kd_simulation_step(struct KdSimulation *sim, uint64_t n_kicks);

// Undoes `n_kicks` periods; fails if that would go below `t = 0`.
//
// # Safety
// As for [`kd_simulation_step`].
enum KdStatus kd_simulation_step_inverse(struct KdSimulation *sim, uint64_t n_kicks);

// Measures the current state. The θ mean is unwrapped against the value
// returned by the previous call on this handle.
//
// # Safety
// `sim` must be a live handle; `out` must be valid for writes.
enum KdStatus kd_simulation_observables(const struct KdSimulation *sim, struct KdObservables *out);

// Number of momentum modes of the handle (0 for null).
//
// # Safety
// `sim` must be null or a live handle.
size_t kd_simulation_n_modes(const struct KdSimulation *sim);

// Writes the momentum density for `p = −N/2 … N/2 − 1` into `out[0..N]`.
//
// # Safety
// `sim` must be a live handle; `out` must be valid for `len` writes.
enum KdStatus kd_simulation_momentum_density(const struct KdSimulation *sim,
                                             double *out,
                                             size_t len);

// Drive amplitude, phase shift and Bloch period of the averaged dynamics.
//
// # Safety
// `out` must be valid for writes.
enum KdStatus kd_effective_params(double kick,
                                  double period,
                                  double alpha,
                                  struct KdEffectiveParams *out);

// Both times at which the packet-center orbit from `p0` crosses `p = 0`.
// Returns [`KdStatus::NoCrossing`] when it never does.
//
// # Safety
// `t1` and `t2` must be valid for writes.
enum KdStatus kd_crossing_time(double p0,
                               double kick,
                               double period,
                               double alpha,
                               double *t1,
                               double *t2);

// Single-passage tunneling probability into the upper band.
//
// # Safety
// `out` must be valid for writes.
enum KdStatus kd_lz_probability(double mass,
                                double alpha,
                                double kick,
                                double period,
                                double p0,
                                double *out);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into this library on the same thread.
const char *kd_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *kd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KICKED_DIRAC_H */
