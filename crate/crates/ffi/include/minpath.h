#ifndef MINPATH_H
#define MINPATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MinpathProblem {
  /**
   * Single pair, fewest colors.
   */
  MINPATH_PROBLEM_PATH = 0,
  /**
   * Every pair must be connected.
   */
  MINPATH_PROBLEM_STEINER = 1,
  /**
   * Pairs with finite prizes may be forfeited.
   */
  MINPATH_PROBLEM_PRIZE = 2,
} MinpathProblem;

typedef enum MinpathStatus {
  MINPATH_STATUS_OK = 0,
  MINPATH_STATUS_NULL_POINTER = 1,
  MINPATH_STATUS_INVALID_UTF8 = 2,
  MINPATH_STATUS_PARSE = 3,
  MINPATH_STATUS_INVALID_INSTANCE = 4,
  MINPATH_STATUS_NOT_PLANAR = 5,
  MINPATH_STATUS_DISCONNECTED = 6,
  MINPATH_STATUS_OUT_OF_RANGE = 7,
  MINPATH_STATUS_BAD_WEIGHTS = 8,
  MINPATH_STATUS_INVALID_CONFIG = 9,
  MINPATH_STATUS_ITERATION_LIMIT = 10,
  MINPATH_STATUS_INVARIANT_VIOLATION = 11,
  MINPATH_STATUS_LIMIT_EXCEEDED = 12,
  MINPATH_STATUS_BUFFER_TOO_SMALL = 13,
  MINPATH_STATUS_INTERNAL = 14,
  MINPATH_STATUS_PANIC = 15,
} MinpathStatus;

typedef enum MinpathStrategy {
  MINPATH_STRATEGY_BALL_CARVING = 0,
  MINPATH_STRATEGY_KPR_CHOP = 1,
} MinpathStrategy;

/**
 * Opaque instance handle.
 */
typedef struct MinpathInstance MinpathInstance;

/**
 * Opaque solution handle.
 */
typedef struct MinpathSolution MinpathSolution;

typedef struct MinpathOptions {
  double epsilon;
  double tolerance;
  enum MinpathStrategy strategy;
  /**
   * Add colors greedily instead of failing when rounding leaves a pair
   * disconnected.
   */
  bool repair;
} MinpathOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct MinpathOptions minpath_options_default(void);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *minpath_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void minpath_string_free(char *s);

/**
 * Parses a JSON instance. Only the format is checked here; call
 * `minpath_instance_validate` for the structural invariants.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MinpathStatus minpath_instance_from_json(const char *json, struct MinpathInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from `minpath_instance_from_json`.
 */
void minpath_instance_free(struct MinpathInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live instance handle.
 */
size_t minpath_instance_num_vertices(const struct MinpathInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live instance handle.
 */
size_t minpath_instance_num_colors(const struct MinpathInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live instance handle.
 */
size_t minpath_instance_num_pairs(const struct MinpathInstance *inst);

/**
 * `Ok` when every invariant holds; otherwise `InvalidInstance` with the
 * violations in the error message.
 *
 * # Safety
 * `inst` must be a live instance handle.
 */
enum MinpathStatus minpath_instance_validate(const struct MinpathInstance *inst);

/**
 * Runs the approximation algorithm. `options` may be null for defaults.
 *
 * # Safety
 * `inst` must be a live instance handle, `options` null or valid, and
 * `out` a valid pointer.
 */
enum MinpathStatus minpath_solve(const struct MinpathInstance *inst,
                                 enum MinpathProblem problem,
                                 const struct MinpathOptions *options,
                                 struct MinpathSolution **out);

/**
 * # Safety
 * `sol` must be null or a handle from `minpath_solve`.
 */
void minpath_solution_free(struct MinpathSolution *sol);

/**
 * NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
double minpath_solution_objective(const struct MinpathSolution *sol);

/**
 * # Safety
 * `sol` must be null or a live solution handle.
 */
double minpath_solution_lower_bound(const struct MinpathSolution *sol);

/**
 * Writes the chosen colors into `buf` if `cap` suffices and returns how
 * many there are.
 *
 * # Safety
 * `sol` must be null or a live solution handle; `buf` must be null or
 * point to `cap` writable elements.
 */
size_t minpath_solution_colors(const struct MinpathSolution *sol, size_t *buf, size_t cap);

/**
 * Vertex path of pair `pair`, same buffer protocol as
 * `minpath_solution_colors`. Returns 0 for forfeited or unknown pairs.
 *
 * # Safety
 * As for `minpath_solution_colors`.
 */
size_t minpath_solution_path(const struct MinpathSolution *sol,
                             size_t pair,
                             size_t *buf,
                             size_t cap);

/**
 * Full solution as JSON; free with `minpath_string_free`. Null on error.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
char *minpath_solution_to_json(const struct MinpathSolution *sol);

/**
 * Minimum-weight color separator for pair `pair` after removing terminal
 * colors. `weights` holds one entry per color. On success `*found` says
 * whether any separator exists; if so its colors go to `buf` (when
 * `cap` suffices), their count to `*count` and the weight to `*weight`.
 *
 * # Safety
 * `inst` must be a live handle; `weights` must point to `num_weights`
 * values; `buf` null or `cap` writable elements; the out pointers valid.
 */
enum MinpathStatus minpath_min_separator(const struct MinpathInstance *inst,
                                         size_t pair,
                                         const double *weights,
                                         size_t num_weights,
                                         size_t *buf,
                                         size_t cap,
                                         bool *found,
                                         size_t *count,
                                         double *weight);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINPATH_H */
