#ifndef BRANCHSIM_H
#define BRANCHSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_NULL_POINTER = 1,
  BS_STATUS_INVALID_PARAMETER = 2,
  BS_STATUS_UNSUPPORTED_MOMENT = 3,
  BS_STATUS_EMPTY_SAMPLE = 4,
  BS_STATUS_NON_FINITE_SAMPLE = 5,
  BS_STATUS_WRONG_VARIANT = 6,
  BS_STATUS_BUDGET_EXCEEDED = 7,
  BS_STATUS_IO = 8,
  BS_STATUS_CONFIG = 9,
  BS_STATUS_PANIC = 10,
} BsStatus;

typedef enum BsDistKind {
  BS_DIST_KIND_CONSTANT = 0,
  BS_DIST_KIND_UNIFORM = 1,
  BS_DIST_KIND_EXPONENTIAL = 2,
  BS_DIST_KIND_POISSON = 3,
  BS_DIST_KIND_ZETA = 4,
  BS_DIST_KIND_BERNOULLI = 5,
} BsDistKind;

typedef enum BsConditionCase {
  BS_CONDITION_CASE_CONTRACTIVE = 0,
  BS_CONDITION_CASE_CRITICAL_CENTERED = 1,
  BS_CONDITION_CASE_FAIL = 2,
} BsConditionCase;

typedef enum BsHKind {
  BS_H_KIND_IDENTITY = 0,
  BS_H_KIND_ABS = 1,
  BS_H_KIND_POWER = 2,
  BS_H_KIND_INDICATOR_GT = 3,
  BS_H_KIND_CLIPPED = 4,
} BsHKind;

/**
 * Opaque branching-vector model.
 */
typedef struct BsModel BsModel;

/**
 * Opaque bootstrap sample pool.
 */
typedef struct BsPool BsPool;

/**
 * A one-dimensional law. `p1`/`p2` are, by kind: constant (value),
 * uniform (a, b), exponential (rate), poisson (mean), zeta (s), bernoulli (p).
 */
typedef struct BsDist {
  enum BsDistKind kind;
  double p1;
  double p2;
} BsDist;

typedef struct BsMomentReport {
  double beta;
  double rho_1;
  double rho_beta;
  double q_abs_moment;
  double q_mean;
  enum BsConditionCase condition;
} BsMomentReport;

typedef struct BsDrawCounts {
  uint64_t vector_draws;
  uint64_t q_draws;
} BsDrawCounts;

/**
 * Test function `h`; `param` is the exponent, threshold or clip level.
 */
typedef struct BsH {
  enum BsHKind kind;
  double param;
} BsH;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *bs_last_error_message(void);

/**
 * Model with independent `Q`, `N` and i.i.d. weights `C_i`.
 */
enum BsStatus bs_model_independent(struct BsDist q,
                                   struct BsDist n,
                                   struct BsDist c,
                                   struct BsModel **model_out);

/**
 * The Quicksort branching vector.
 */
enum BsStatus bs_model_quicksort(struct BsModel **model_out);

/**
 * Homogeneous model (no additive term).
 */
enum BsStatus bs_model_homogeneous(struct BsDist n, struct BsDist c, struct BsModel **model_out);

/**
 * # Safety
 * `model` must come from a `bs_model_*` constructor and not be used afterwards.
 */
void bs_model_free(struct BsModel *model);

/**
 * `rho_beta = E[sum_i |C_i|^beta]`.
 *
 * # Safety
 * `model` must be a live handle and `rho_out` writable.
 */
enum BsStatus bs_model_rho(const struct BsModel *model, double beta, double *rho_out);

/**
 * Evaluates the convergence conditions at `beta`.
 *
 * # Safety
 * `model` must be a live handle and `report_out` writable.
 */
enum BsStatus bs_model_check(const struct BsModel *model,
                             double beta,
                             struct BsMomentReport *report_out);

/**
 * Runs the bootstrap to level `k` with pool size `m`. `counts_out` may be NULL.
 *
 * # Safety
 * `model` must be a live handle, `pool_out` writable.
 */
enum BsStatus bs_bootstrap_run(const struct BsModel *model,
                               size_t k,
                               size_t m,
                               uint64_t seed,
                               struct BsPool **pool_out,
                               struct BsDrawCounts *counts_out);

/**
 * Number of values in the pool, 0 for NULL.
 *
 * # Safety
 * `pool` must be NULL or a live handle.
 */
size_t bs_pool_len(const struct BsPool *pool);

/**
 * Level `k` the pool approximates.
 *
 * # Safety
 * `pool` must be NULL or a live handle.
 */
size_t bs_pool_level(const struct BsPool *pool);

/**
 * Copies the pool into `values_out`, which must hold `bs_pool_len(pool)` values.
 *
 * # Safety
 * `values_out` must be writable for `capacity` doubles.
 */
enum BsStatus bs_pool_values(const struct BsPool *pool, double *values_out, size_t capacity);

/**
 * # Safety
 * `pool` must come from `bs_bootstrap_run` and not be used afterwards.
 */
void bs_pool_free(struct BsPool *pool);

/**
 * Plug-in estimate of `E[h(R^(k))]` from a pool.
 *
 * # Safety
 * `pool` must be a live handle and `estimate_out` writable.
 */
enum BsStatus bs_estimate_h(const struct BsPool *pool, struct BsH h, double *estimate_out);

/**
 * Draws `reps` exact samples of `R^(k)` into `values_out`. Samples that hit
 * `node_budget` are partial; their number goes to `truncated_out` (may be NULL).
 *
 * # Safety
 * `values_out` must be writable for `reps` doubles.
 */
enum BsStatus bs_exact_sample(const struct BsModel *model,
                              size_t k,
                              size_t reps,
                              uint64_t seed,
                              uint64_t node_budget,
                              double *values_out,
                              struct BsDrawCounts *counts_out,
                              uint64_t *truncated_out);

/**
 * Wasserstein-1 distance between the empirical laws of two samples.
 *
 * # Safety
 * `a` and `b` must be readable for `a_len` and `b_len` doubles.
 */
enum BsStatus bs_d1_empirical(const double *a,
                              size_t a_len,
                              const double *b,
                              size_t b_len,
                              double *distance_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRANCHSIM_H */
