#ifndef BESTCHOICE_H
#define BESTCHOICE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum BcStatus {
  BC_STATUS_OK = 0,
  BC_STATUS_INVALID_ARGUMENT = 1,
  BC_STATUS_UNSUPPORTED_STRATEGY = 2,
  BC_STATUS_UNSUPPORTED_COMPARISON = 3,
  BC_STATUS_CONSTRUCTION_FAILED = 4,
  BC_STATUS_DEGENERATE_STATE = 5,
  /**
   * A strategy string did not parse.
   */
  BC_STATUS_PARSE_ERROR = 6,
  BC_STATUS_NULL_POINTER = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  BC_STATUS_PANIC = 8,
} BcStatus;

/**
 * Opaque sample-size distribution handle.
 */
typedef struct BcPrior BcPrior;

/**
 * Opaque strategy handle.
 */
typedef struct BcStrategy BcStrategy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. Valid until the next call into the library.
 */
const char *bc_last_error_message(void);

/**
 * Parse a strategy string such as `x:0.3`, `d:4`, `onee`,
 * `cutoffs:0.9,0.5;tail=0.3`, `skipfirst:a1=1,x=0.36` or `restart:x=0.4,y=0.3`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BcStatus bc_strategy_parse(const char *text, struct BcStrategy **out);

/**
 * Cutoff strategy `a_1, ..., a_len` followed by `tail` for every later index.
 *
 * # Safety
 * `cutoffs` must point to `len` doubles; `out` must be writable.
 */
enum BcStatus bc_strategy_from_cutoffs(const double *cutoffs,
                                       size_t len,
                                       double tail,
                                       struct BcStrategy **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void bc_strategy_free(struct BcStrategy *s);

/**
 * Exact probability of selecting the best of `n` items.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum BcStatus bc_strategy_win_prob(const struct BcStrategy *s, uint64_t n, double *out);

/**
 * Monte Carlo estimate; the result depends only on `seed`, not on the
 * number of threads.
 *
 * # Safety
 * `s` must be a live handle; `p` and `std_error` must be writable.
 */
enum BcStatus bc_strategy_estimate(const struct BcStrategy *s,
                                   uint64_t n,
                                   uint64_t trials,
                                   uint64_t seed,
                                   double *p,
                                   double *std_error);

/**
 * # Safety
 * `out` must be writable.
 */
enum BcStatus bc_prior_point_mass(uint64_t n, struct BcPrior **out);

/**
 * Finite prior with `weights[i]` on `ns[i]`; weights must sum to one.
 *
 * # Safety
 * `ns` and `weights` must point to `len` elements; `out` must be writable.
 */
enum BcStatus bc_prior_finite(const uint64_t *ns,
                              const double *weights,
                              size_t len,
                              struct BcPrior **out);

/**
 * `P(N = n) = θ (1 + θ)^{-n}`, `n >= 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BcStatus bc_prior_geometric(double theta, struct BcPrior **out);

/**
 * # Safety
 * `p` must come from this library and not be freed twice. Null is ignored.
 */
void bc_prior_free(struct BcPrior *p);

/**
 * Win probability averaged over the prior. `error_bound` is zero for
 * finite priors and bounds the truncated tail for geometric ones.
 *
 * # Safety
 * Handles must be live; `value` and `error_bound` must be writable.
 */
enum BcStatus bc_mixture_value(const struct BcStrategy *s,
                               const struct BcPrior *p,
                               double *value,
                               double *error_bound);

/**
 * Win probability of "first record from index `d` on" with `n` items.
 *
 * # Safety
 * `out` must be writable.
 */
enum BcStatus bc_win_prob_d(uint64_t d, uint64_t n, double *out);

/**
 * Win probability of "first record after time `x`" with `n` items.
 *
 * # Safety
 * `out` must be writable.
 */
enum BcStatus bc_win_prob_x(uint64_t n, double x, double *out);

/**
 * Best index threshold for a known `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BcStatus bc_optimal_d(uint64_t n, uint64_t *out);

/**
 * Best time threshold for a known `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BcStatus bc_argmax_x(uint64_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESTCHOICE_H */
