#ifndef GENUT_H
#define GENUT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum GenutStatus {
  GENUT_STATUS_OK = 0,
  GENUT_STATUS_NULL_POINTER,
  GENUT_STATUS_INVALID_ARGUMENT,
  GENUT_STATUS_PARAMETER_DOMAIN,
  GENUT_STATUS_DIMENSION_MISMATCH,
  GENUT_STATUS_NON_FINITE,
  GENUT_STATUS_NOT_SYMMETRIC,
  GENUT_STATUS_FACTORIZATION,
  GENUT_STATUS_INFEASIBLE,
  GENUT_STATUS_CONSTRAINT,
  GENUT_STATUS_EVALUATION,
  GENUT_STATUS_BUFFER_TOO_SMALL,
  GENUT_STATUS_IO,
  GENUT_STATUS_PANIC,
} GenutStatus;

/**
 * How `u` is chosen by [`genut_sigma_generate`].
 */
typedef enum GenutUMode {
  /**
   * Match the diagonal kurtosis; infeasible components are an error.
   */
  GENUT_U_MODE_MATCH_KURTOSIS = 0,
  /**
   * Match where feasible, otherwise fall back per component.
   */
  GENUT_U_MODE_DEFAULT,
  /**
   * Use the caller's `u` buffer.
   */
  GENUT_U_MODE_EXPLICIT,
} GenutUMode;

/**
 * Opaque moment spec.
 */
typedef struct GenutMomentSpec GenutMomentSpec;

/**
 * Opaque propagation result.
 */
typedef struct GenutResult GenutResult;

/**
 * Opaque sigma point set.
 */
typedef struct GenutSigmaSet GenutSigmaSet;

/**
 * First four moments of a univariate distribution.
 */
typedef struct GenutMoments {
  double mean;
  double variance;
  double skewness;
  double kurtosis;
} GenutMoments;

/**
 * `y = f(x)`: write `m` outputs for `n` inputs, return 0 on success.
 */
typedef int32_t (*GenutTransformCallback)(void *user, const double *x, size_t n, double *y, size_t m);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the most recent failure on this thread, or null. Valid
 * until the next failing call on the same thread.
 */
const char *genut_last_error(void);

/**
 * Clears the stored error message.
 */
void genut_clear_error(void);

/**
 * Closed-form moments of a distribution given as JSON, e.g.
 * `{"kind":"poisson","lambda":2}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum GenutStatus genut_moments_of(const char *json, struct GenutMoments *out);

/**
 * Builds a moment spec from dimension `n`, a mean of length `n`, a
 * row-major `n × n` covariance, and diagonal skewness and kurtosis.
 *
 * # Safety
 * Buffers must hold the stated number of values; `out` must be writable.
 */
enum GenutStatus genut_moment_spec_new(size_t n,
                                       const double *mean,
                                       const double *covariance,
                                       const double *skew_diag,
                                       const double *kurt_diag,
                                       struct GenutMomentSpec **out);

/**
 * Joint moment spec of independent distributions given as a JSON array.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum GenutStatus genut_moment_spec_from_json(const char *json, struct GenutMomentSpec **out);

/**
 * Dimension of a moment spec; 0 for null.
 *
 * # Safety
 * `spec` must be null or a live handle.
 */
size_t genut_moment_spec_dim(const struct GenutMomentSpec *spec);

/**
 * # Safety
 * `spec` must be null or a handle not yet freed.
 */
void genut_moment_spec_free(struct GenutMomentSpec *spec);

/**
 * Generalized sigma points. `u` is read only for [`GenutUMode::Explicit`]
 * and must then hold `n` values.
 *
 * # Safety
 * Pointers must be valid as described.
 */
enum GenutStatus genut_sigma_generate(const struct GenutMomentSpec *spec,
                                      enum GenutUMode mode,
                                      const double *u,
                                      struct GenutSigmaSet **out);

/**
 * Repairs `base` so every point lies in `[lower, upper]`. Use `±INFINITY`
 * for absent bounds.
 *
 * # Safety
 * `lower` and `upper` must hold `n` values; other pointers must be valid.
 */
enum GenutStatus genut_sigma_constrain(const struct GenutMomentSpec *spec,
                                       const struct GenutSigmaSet *base,
                                       const double *lower,
                                       const double *upper,
                                       double theta,
                                       struct GenutSigmaSet **out);

/**
 * Symmetric unscented transform points for the moment spec mean and
 * covariance.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GenutStatus genut_ut_sigma_points(const struct GenutMomentSpec *spec,
                                       double kappa,
                                       struct GenutSigmaSet **out);

/**
 * Dimension `n` of the set; 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t genut_sigma_set_dim(const struct GenutSigmaSet *set);

/**
 * Number of points `2n + 1`; 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t genut_sigma_set_len(const struct GenutSigmaSet *set);

/**
 * Copies the `n × (2n+1)` point matrix, row-major.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_sigma_set_points(const struct GenutSigmaSet *set, double *out, size_t cap);

/**
 * Copies the `2n + 1` weights.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_sigma_set_weights(const struct GenutSigmaSet *set, double *out, size_t cap);

/**
 * Copies the `n` values of `u`.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_sigma_set_u(const struct GenutSigmaSet *set, double *out, size_t cap);

/**
 * Copies the `n` values of `v`.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_sigma_set_v(const struct GenutSigmaSet *set, double *out, size_t cap);

/**
 * # Safety
 * `set` must be null or a handle not yet freed.
 */
void genut_sigma_set_free(struct GenutSigmaSet *set);

/**
 * Propagates the set through `f`, which maps `n` inputs to `m` outputs and
 * is called once per point on the calling thread. A non-zero return from
 * `f` fails the call with [`GenutStatus::Evaluation`].
 *
 * # Safety
 * `f` must be safe to call with the arguments described; `user` is passed
 * through untouched.
 */
enum GenutStatus genut_propagate(const struct GenutSigmaSet *set,
                                 GenutTransformCallback f,
                                 void *user,
                                 size_t m,
                                 struct GenutResult **out);

/**
 * Output dimension `m`; 0 for null.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
size_t genut_result_dim(const struct GenutResult *res);

/**
 * Copies the `m` mean values.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_result_mean(const struct GenutResult *res, double *out, size_t cap);

/**
 * Copies the `m × m` covariance, row-major.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_result_covariance(const struct GenutResult *res, double *out, size_t cap);

/**
 * Copies the `m` diagonal third central moments.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_result_skew_diag(const struct GenutResult *res, double *out, size_t cap);

/**
 * Copies the `m` diagonal fourth central moments.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum GenutStatus genut_result_kurt_diag(const struct GenutResult *res, double *out, size_t cap);

/**
 * # Safety
 * `res` must be null or a handle not yet freed.
 */
void genut_result_free(struct GenutResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENUT_H */
