#ifndef WITTOP_H
#define WITTOP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Codes 1-8 match the library error kinds.
 */
typedef enum WittopStatus {
  WITTOP_STATUS_OK = 0,
  WITTOP_STATUS_INVALID_INPUT = 1,
  WITTOP_STATUS_NOT_A_PTH_POWER = 2,
  WITTOP_STATUS_NOT_IN_IMAGE = 3,
  WITTOP_STATUS_NOT_AN_OPERATOR = 4,
  WITTOP_STATUS_CONTEXT_OVERFLOW = 5,
  WITTOP_STATUS_NO_FIT = 6,
  WITTOP_STATUS_CONVERGENCE_FAILURE = 7,
  WITTOP_STATUS_PARSE = 8,
  WITTOP_STATUS_NULL_POINTER = 9,
  WITTOP_STATUS_INVALID_UTF8 = 10,
  WITTOP_STATUS_PANIC = 11,
} WittopStatus;

/**
 * A Witt differential operator in normal form, with its working context.
 */
typedef struct WittopOperator WittopOperator;

/**
 * A truncated Witt vector over F_p[T1..Tn].
 */
typedef struct WittopWitt WittopWitt;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *wittop_last_error(void);

/**
 * Library version as a static string.
 */
const char *wittop_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void wittop_string_free(char *s);

/**
 * Parses `[f0;f1;...]` as a Witt vector of length `len`.
 *
 * # Safety
 * `s` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_parse(const char *s,
                                    uint64_t p,
                                    size_t nvars,
                                    size_t len,
                                    struct WittopWitt **out);

/**
 * # Safety
 * `w` must come from this library or be null.
 */
void wittop_witt_free(struct WittopWitt *w);

/**
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_add(const struct WittopWitt *a,
                                  const struct WittopWitt *b,
                                  struct WittopWitt **out);

/**
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_sub(const struct WittopWitt *a,
                                  const struct WittopWitt *b,
                                  struct WittopWitt **out);

/**
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_mul(const struct WittopWitt *a,
                                  const struct WittopWitt *b,
                                  struct WittopWitt **out);

/**
 * F^k.
 *
 * # Safety
 * `a` must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_frobenius(const struct WittopWitt *a,
                                        uint32_t k,
                                        struct WittopWitt **out);

/**
 * V^k at the same length.
 *
 * # Safety
 * `a` must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_verschiebung(const struct WittopWitt *a,
                                           size_t k,
                                           struct WittopWitt **out);

/**
 * Restriction to length `len`.
 *
 * # Safety
 * `a` must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_restrict(const struct WittopWitt *a,
                                       size_t len,
                                       struct WittopWitt **out);

/**
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_equal(const struct WittopWitt *a,
                                    const struct WittopWitt *b,
                                    bool *out);

/**
 * Text form `[f0;f1;...]`.
 *
 * # Safety
 * `a` must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_to_string(const struct WittopWitt *a, char **out);

/**
 * Image in (Z/p^L)[T] as text.
 *
 * # Safety
 * `a` must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_witt_embed(const struct WittopWitt *a, char **out);

/**
 * Parses an operator such as `{d1}_{1/2}` in the working context with
 * the given prime, variables, length, degree bound and level.
 *
 * # Safety
 * `s` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WittopStatus wittop_operator_parse(const char *s,
                                        uint64_t p,
                                        size_t nvars,
                                        size_t len,
                                        uint32_t max_deg,
                                        uint32_t level,
                                        struct WittopOperator **out);

/**
 * # Safety
 * `q` must come from this library or be null.
 */
void wittop_operator_free(struct WittopOperator *q);

/**
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_operator_apply(const struct WittopOperator *q,
                                        const struct WittopWitt *w,
                                        struct WittopWitt **out);

/**
 * q1 after q2.
 *
 * # Safety
 * Handles must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_operator_compose(const struct WittopOperator *q1,
                                          const struct WittopOperator *q2,
                                          struct WittopOperator **out);

/**
 * Normal form as text.
 *
 * # Safety
 * `q` must be valid and `out` a valid pointer.
 */
enum WittopStatus wittop_operator_to_string(const struct WittopOperator *q, char **out);

/**
 * Runs a verification suite (or "all") with the default grid and the
 * given seed; `samples` overrides the per-check sample counts when
 * nonzero. Writes the JSON report and whether every check passed.
 *
 * # Safety
 * `suite` must be a NUL-terminated string; `passed` and `report` valid
 * pointers.
 */
enum WittopStatus wittop_verify(const char *suite,
                                uint64_t seed,
                                size_t samples,
                                bool *passed,
                                char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WITTOP_H */
