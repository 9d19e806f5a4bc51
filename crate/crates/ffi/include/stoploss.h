#ifndef STOPLOSS_H
#define STOPLOSS_H

/* Generated by cbindgen from stoploss-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  /**
   * Argument outside the domain of the function.
   */
  SL_STATUS_DOMAIN = 2,
  /**
   * Malformed model text or invalid parameters.
   */
  SL_STATUS_INVALID_MODEL = 3,
  /**
   * Dependence parameters fail the admissibility check.
   */
  SL_STATUS_INADMISSIBLE = 4,
  /**
   * A probability strayed outside `[0, 1]` beyond round-off.
   */
  SL_STATUS_NUMERICAL = 5,
  SL_STATUS_UNSUPPORTED = 6,
  SL_STATUS_PANIC = 7,
} SlStatus;

/**
 * Admissibility verdict, mirrors the engine's validation status.
 */
typedef enum SlValidation {
  SL_VALIDATION_OK = 0,
  SL_VALIDATION_VIOLATION = 1,
  SL_VALIDATION_CONDITIONAL = 2,
  SL_VALIDATION_UNCHECKED = 3,
} SlValidation;

/**
 * A model together with its reinsurance program, ready for evaluation.
 */
typedef struct SlEngine SlEngine;

/**
 * A mixed Erlang distribution.
 */
typedef struct SlMixedErlang SlMixedErlang;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message on this thread, without the
 * terminating NUL; 0 when the last call succeeded.
 */
size_t sl_last_error_length(void);

/**
 * Copy the last error message into `buf` (NUL-terminated, truncated to
 * `len - 1` bytes). Returns the full message length.
 *
 * # Safety
 * `buf` must be valid for `len` bytes, or null with `len == 0`.
 */
size_t sl_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/**
 * # Safety
 * `weights` must point to `len` doubles; `out` must be writable.
 */
enum SlStatus sl_mixed_erlang_new(double scale,
                                  const double *weights,
                                  size_t len,
                                  struct SlMixedErlang **out);

/**
 * # Safety
 * `h` must come from [`sl_mixed_erlang_new`] and not be used afterwards.
 */
void sl_mixed_erlang_free(struct SlMixedErlang *h);

/**
 * Distribution function at `x`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_mixed_erlang_cdf(const struct SlMixedErlang *h, double x, double *out);

/**
 * Survival function at `x`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_mixed_erlang_sf(const struct SlMixedErlang *h, double x, double *out);

/**
 * Density at `x`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_mixed_erlang_pdf(const struct SlMixedErlang *h, double x, double *out);

/**
 * Quantile at level `x` in `(0, 1)`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_mixed_erlang_quantile(const struct SlMixedErlang *h, double x, double *out);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_mixed_erlang_mean(const struct SlMixedErlang *h, double *out);

/**
 * Build an engine from model JSON. Admissibility failures are refused
 * with [`SlStatus::Inadmissible`] unless `force` is non-zero.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_engine_new(const char *json, int force, struct SlEngine **out);

/**
 * # Safety
 * `h` must come from [`sl_engine_new`] and not be used afterwards.
 */
void sl_engine_free(struct SlEngine *h);

/**
 * Admissibility verdict and the smallest bracket value found.
 *
 * # Safety
 * `h` must be a live handle; out-pointers must be writable.
 */
enum SlStatus sl_engine_validation(const struct SlEngine *h,
                                   enum SlValidation *status,
                                   double *min_bracket);

/**
 * `P(S1 > u1, S2 > u2)`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_joint_tail(const struct SlEngine *h, double u1, double u2, double *out);

/**
 * Distribution function of the aggregate reinsurance payment.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_aggregate_cdf(const struct SlEngine *h, double s, double *out);

/**
 * # Safety
 * `h` must be a live handle; out-pointers must be writable.
 */
enum SlStatus sl_var_tvar(const struct SlEngine *h, double p, double *var, double *tvar);

/**
 * TVaR at level `p` and its split between the two treaties.
 *
 * # Safety
 * `h` must be a live handle; out-pointers must be writable.
 */
enum SlStatus sl_tvar_allocate(const struct SlEngine *h,
                               double p,
                               double *tvar,
                               double *k1,
                               double *k2);

/**
 * Default probability `P(R > K)` and default option value `E[(R − K)+]`.
 *
 * # Safety
 * `h` must be a live handle; out-pointers must be writable.
 */
enum SlStatus sl_default(const struct SlEngine *h, double capital, double *prob, double *value);

/**
 * Unpaid losses of each treaty when capitals `k1`, `k2` are held.
 *
 * # Safety
 * `h` must be a live handle; out-pointers must be writable.
 */
enum SlStatus sl_unpaid(const struct SlEngine *h, double k1, double k2, double *u1, double *u2);

/**
 * Diversification benefit `1 − TVaR(R) / (TVaR(T1) + TVaR(T2))` as a fraction.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SlStatus sl_diversification(const struct SlEngine *h, double p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOPLOSS_H */
