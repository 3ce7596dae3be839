#ifndef POLYMOMENT_H
#define POLYMOMENT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum PmStatus {
  PM_STATUS_OK = 0,
  PM_STATUS_NULL_POINTER = 1,
  PM_STATUS_INVALID_UTF8 = 2,
  PM_STATUS_PARSE = 3,
  PM_STATUS_SCHEMA = 4,
  PM_STATUS_OUT_OF_BOUNDS = 5,
  PM_STATUS_DIMENSION = 6,
  PM_STATUS_BUDGET_EXCEEDED = 7,
  PM_STATUS_INVALID_INPUT = 8,
  /**
   * The strong solver declined; the output string holds the refusal report.
   */
  PM_STATUS_REFUSED = 9,
  PM_STATUS_PANIC = 10,
} PmStatus;

/**
 * Atomic polymeasure with exact rational coefficients.
 */
typedef struct PmPolymeasure PmPolymeasure;

/**
 * Moment tensor with exact rational entries.
 */
typedef struct PmTensor PmTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pm_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void pm_string_free(char *s);

/**
 * Parses a moment tensor from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PmStatus pm_tensor_from_json(const char *json, struct PmTensor **out);

/**
 * Serializes a tensor back to JSON.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum PmStatus pm_tensor_to_json(const struct PmTensor *t, char **out);

/**
 * Number of axes, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t pm_tensor_arity(const struct PmTensor *t);

/**
 * # Safety
 * `t` must be null or a handle from this library not yet freed.
 */
void pm_tensor_free(struct PmTensor *t);

/**
 * Bounded certificate over every order in the tensor. `claimed` is an
 * optional rational such as `"7/3"`; pass null for none.
 *
 * # Safety
 * `t` must be a live handle, `claimed` null or NUL-terminated, `out` writable.
 */
enum PmStatus pm_bounded_constant(const struct PmTensor *t, const char *claimed, char **out);

/**
 * Weak-bound certificate over every order in the tensor.
 *
 * # Safety
 * As for [`pm_bounded_constant`].
 */
enum PmStatus pm_certify_weak(const struct PmTensor *t, const char *claimed, char **out);

/**
 * Complete-monotonicity verdict over every order in the tensor.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum PmStatus pm_check_monotone(const struct PmTensor *t, char **out);

/**
 * Hankel verdict with the first failing pair, if any.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum PmStatus pm_check_hankel(const struct PmTensor *t, char **out);

/**
 * Strong solver with reconstruction order `n_recon` and residuals up to
 * total degree `max_degree`. Returns [`PmStatus::Refused`] with the refusal
 * report in `out` when the tensor is not Hankel or not bounded.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum PmStatus pm_solve_strong(const struct PmTensor *t,
                              size_t n_recon,
                              size_t max_degree,
                              char **out);

/**
 * Parses an atomic polymeasure from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PmStatus pm_polymeasure_from_json(const char *json, struct PmPolymeasure **out);

/**
 * # Safety
 * `g` must be null or a handle from this library not yet freed.
 */
void pm_polymeasure_free(struct PmPolymeasure *g);

/**
 * Moment tensor of `g` with bound `order` on every axis.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum PmStatus pm_polymeasure_moments(const struct PmPolymeasure *g,
                                     size_t order,
                                     struct PmTensor **out);

/**
 * Variation and semivariation report.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum PmStatus pm_semivariation(const struct PmPolymeasure *g, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYMOMENT_H */
