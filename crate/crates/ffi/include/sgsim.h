#ifndef SGSIM_H
#define SGSIM_H

/* Generated by cbindgen from the sgsim-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_ARGUMENT = 2,
  SG_STATUS_NUMERICAL_FAILURE = 3,
} SgStatus;

/**
 * Measurement setting selector.
 */
typedef enum SgSetting {
  SG_SETTING_POSITION_Z = 0,
  SG_SETTING_SPIN_Z = 1,
  SG_SETTING_SPIN_X = 2,
  SG_SETTING_MOMENTUM_Z = 3,
} SgSetting;

/**
 * Structural form of the collapsed state.
 */
typedef enum SgForm {
  SG_FORM_POSITION_EIGENSTATE = 0,
  SG_FORM_SINGLE_BRANCH_GAUSSIAN = 1,
  SG_FORM_BRANCH_SUPERPOSITION = 2,
  SG_FORM_MOMENTUM_EIGENSTATE = 3,
} SgForm;

/**
 * Spin label of the collapsed state.
 */
typedef enum SgSpin {
  SG_SPIN_UP_Z = 0,
  SG_SPIN_DOWN_Z = 1,
  SG_SPIN_UP_X = 2,
  SG_SPIN_DOWN_X = 3,
} SgSpin;

/**
 * Where the collapsed state lives.
 */
typedef enum SgLocation {
  SG_LOCATION_TOKYO = 0,
  SG_LOCATION_PARIS = 1,
  SG_LOCATION_DELOCALIZED = 2,
} SgLocation;

/**
 * Opaque physical-parameter handle.
 */
typedef struct SgParams SgParams;

/**
 * Opaque deterministic random stream handle.
 */
typedef struct SgRng SgRng;

/**
 * One sampled measurement: Alice's reading plus the collapsed-state
 * labels. `detected_locally == false` means her device registered
 * nothing and `value` is the inferred remote eigenvalue.
 */
typedef struct SgOutcome {
  double value;
  bool detected_locally;
  enum SgForm form;
  enum SgSpin spin;
  enum SgLocation location;
} SgOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *sg_version(void);

/**
 * New parameter handle with the dimensionless defaults
 * (hbar = m = mu_c = b = sigma0 = 1, B0 = k_y = 0).
 */
struct SgParams *sg_params_new(void);

/**
 * New parameter handle with illustrative silver-atom-like SI magnitudes.
 */
struct SgParams *sg_params_new_silver_like(void);

/**
 * Release a parameter handle. NULL is a no-op.
 *
 * # Safety
 * `params` must be NULL or a pointer previously returned by one of the
 * `sg_params_new*` functions, not yet freed.
 */
void sg_params_free(struct SgParams *params);

/**
 * Set one field by name ("mu_c", "b", "b0", "m", "sigma0", "hbar",
 * "k_y"). The value is validated together with the rest of the record.
 *
 * # Safety
 * `params` must be a live handle; `key` a NUL-terminated string.
 */
enum SgStatus sg_params_set(struct SgParams *params, const char *key, double value);

/**
 * Read one field by name.
 *
 * # Safety
 * `params` must be a live handle; `key` NUL-terminated; `out` writable.
 */
enum SgStatus sg_params_get(const struct SgParams *params, const char *key, double *out);

/**
 * New deterministic stream for (seed, stream_id).
 */
struct SgRng *sg_rng_new(uint64_t seed, uint64_t stream_id);

/**
 * Release a stream handle. NULL is a no-op.
 *
 * # Safety
 * `rng` must be NULL or a pointer previously returned by `sg_rng_new`,
 * not yet freed.
 */
void sg_rng_free(struct SgRng *rng);

/**
 * Next uniform draw in [0, 1).
 *
 * # Safety
 * `rng` must be a live stream handle and `out` writable.
 */
enum SgStatus sg_rng_uniform(struct SgRng *rng, double *out);

/**
 * Spatial density in z at time t, with its spin-resolved parts.
 *
 * # Safety
 * `params` must be a live handle; the three outputs writable.
 */
enum SgStatus sg_position_pdf(const struct SgParams *params,
                              double t,
                              double z,
                              double *out_total,
                              double *out_up,
                              double *out_down);

/**
 * Complex overlap <phi_plus|phi_minus> at time t.
 *
 * # Safety
 * `params` must be a live handle; `out_re`, `out_im` writable.
 */
enum SgStatus sg_branch_overlap(const struct SgParams *params,
                                double t,
                                double *out_re,
                                double *out_im);

/**
 * Outcome probabilities of a setting at time t. The first slot is the
 * Tokyo side for position/momentum and +hbar/2 for the spin settings.
 *
 * # Safety
 * `params` must be a live handle; `out_first`, `out_second` writable.
 */
enum SgStatus sg_outcome_probabilities(const struct SgParams *params,
                                       enum SgSetting setting,
                                       double t,
                                       double *out_first,
                                       double *out_second);

/**
 * Sample one measurement, advancing the stream.
 *
 * # Safety
 * `params` and `rng` must be live handles; `out` writable.
 */
enum SgStatus sg_measure(const struct SgParams *params,
                         enum SgSetting setting,
                         double t,
                         struct SgRng *rng,
                         struct SgOutcome *out);

/**
 * Relative Schroedinger residual of the 1-D z-restriction on a uniform
 * grid (at least 64 points).
 *
 * # Safety
 * `params` must be a live handle; `out` writable.
 */
enum SgStatus sg_schrodinger_residual(const struct SgParams *params,
                                      double t,
                                      double z_min,
                                      double z_max,
                                      size_t points,
                                      double *out);

/**
 * Largest deviation of the discrete boxes model's setting-averaged path
 * marginals across the three settings (quantum non-signaling pins this
 * to zero).
 *
 * # Safety
 * `out` must be writable.
 */
enum SgStatus sg_boxes_nonsignaling_deviation(double *out);

/**
 * Max-min trace distance between the PositionZ and SpinX assemblages of
 * the shared discrete state (the steering signature, sqrt(3)/2).
 *
 * # Safety
 * `out` must be writable.
 */
enum SgStatus sg_boxes_steering_distance(double *out);

/**
 * Run the steering protocol with a fixed setting for every atom and
 * return the CSV record stream as a NUL-terminated string (release it
 * with `sg_string_free`).
 *
 * # Safety
 * `params` must be a live handle and `out_csv` writable.
 */
enum SgStatus sg_protocol_run_csv(const struct SgParams *params,
                                  uint64_t n_atoms,
                                  enum SgSetting setting,
                                  double t,
                                  uint64_t seed,
                                  char **out_csv);

/**
 * Release a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned by this library,
 * not yet freed.
 */
void sg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SGSIM_H */
