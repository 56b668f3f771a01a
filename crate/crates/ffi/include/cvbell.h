#ifndef CVBELL_H
#define CVBELL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CvbStatus {
  CVB_STATUS_OK = 0,
  CVB_STATUS_NULL_POINTER = 1,
  CVB_STATUS_INVALID_UTF8 = 2,
  /**
   * The state document is not valid JSON or names unknown fields.
   */
  CVB_STATUS_PARSE = 3,
  /**
   * Settings are malformed (lengths, signs, δ range).
   */
  CVB_STATUS_INVALID_SETTINGS = 4,
  /**
   * An operator needs more headroom than the state guarantees.
   */
  CVB_STATUS_HEADROOM = 5,
  /**
   * A truncation budget, normalization or numerical check failed.
   */
  CVB_STATUS_NUMERICAL = 6,
  /**
   * The operation does not apply to this state or argument.
   */
  CVB_STATUS_INVALID_ARGUMENT = 7,
  CVB_STATUS_PANIC = 8,
} CvbStatus;

/**
 * Opaque state handle.
 */
typedef struct CvbState CvbState;

typedef struct CvbReport {
  double lhs;
  double rhs;
  double s_squared;
  double product_number_moment;
  double minor_d;
  double beta;
  double b_product_re;
  double b_product_im;
  /**
   * Bit k set when mode k has `s_k = -1`.
   */
  uint64_t bipartition;
  bool trivial_bipartition;
  bool violated;
} CvbReport;

typedef struct CvbVerification {
  struct CvbReport report;
  /**
   * False when no dense oracle ran; `pt_min_eig` is then NaN.
   */
  bool has_pt_min_eig;
  double pt_min_eig;
  bool consistent;
} CvbVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a state from a JSON specification (the CLI's state document).
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 * On success `*out` owns a handle to be released with [`cvb_state_free`].
 */
enum CvbStatus cvb_state_from_json(const char *json, struct CvbState **out);

/**
 * # Safety
 * `state` must be null or a handle from [`cvb_state_from_json`] that has
 * not been freed.
 */
void cvb_state_free(struct CvbState *state);

/**
 * Number of modes, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t cvb_state_n_modes(const struct CvbState *state);

/**
 * Evaluates the CFRD functional. `theta` and `delta` may be null (zeros);
 * `s` holds `n` entries of +1 or -1.
 *
 * # Safety
 * `state` must be a live handle, non-null arrays must hold `n` elements and
 * `out` must be writable.
 */
enum CvbStatus cvb_evaluate(const struct CvbState *state,
                            const double *theta,
                            const double *delta,
                            const int8_t *s,
                            size_t n,
                            struct CvbReport *out);

/**
 * As [`cvb_evaluate`], additionally checking that a violation comes with a
 * negative `minor_d` and, for dense states with `pt_oracle`, a negative
 * partial transpose.
 *
 * # Safety
 * Same contract as [`cvb_evaluate`].
 */
enum CvbStatus cvb_verify(const struct CvbState *state,
                          const double *theta,
                          const double *delta,
                          const int8_t *s,
                          size_t n,
                          bool pt_oracle,
                          struct CvbVerification *out);

/**
 * Smallest eigenvalue of the partial transpose over the modes in
 * `bipartition` (bit k is mode k). Dense states only.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum CvbStatus cvb_partial_transpose_min_eig(const struct CvbState *state,
                                             uint64_t bipartition,
                                             double *out);

/**
 * Message for the last failed call on this thread, or null after a
 * success. The pointer stays valid until the next call on this thread.
 */
const char *cvb_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CVBELL_H */
