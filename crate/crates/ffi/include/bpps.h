#ifndef BPPS_H
#define BPPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define BPPS_ALGO_FFD 0

#define BPPS_ALGO_VNS 1

#define BPPS_ALGO_FF_APPROX 2

#define BPPS_ALGO_BP 3

#define BPPS_ALGO_VNS_BP 4

#define BPPS_ALGO_ENUM 5

typedef enum BppsStatus {
  BPPS_STATUS_OK = 0,
  BPPS_STATUS_NULL_POINTER = 1,
  BPPS_STATUS_INVALID_UTF8 = 2,
  BPPS_STATUS_PARSE = 3,
  BPPS_STATUS_INVALID_ARGUMENT = 4,
  BPPS_STATUS_INFEASIBLE = 5,
  BPPS_STATUS_SOLVER = 6,
  BPPS_STATUS_PANIC = 7,
} BppsStatus;

/**
 * Opaque instance handle.
 */
typedef struct BppsInstance BppsInstance;

/**
 * Opaque solution handle.
 */
typedef struct BppsSolution BppsSolution;

/**
 * Solver limits; obtain defaults from [`bpps_solve_options_default`].
 */
typedef struct BppsSolveOptions {
  uint64_t seed;
  /**
   * VNS time limit in seconds.
   */
  double t_max;
  /**
   * VNS non-improving iteration limit.
   */
  uint64_t c_max;
  /**
   * Branch-and-price time limit in seconds.
   */
  double t_limit;
  bool warm_columns;
} BppsSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next library call on the same thread.
 */
const char *bpps_last_error_message(void);

struct BppsSolveOptions bpps_solve_options_default(void);

/**
 * Parses an instance from NUL-terminated text in the instance file format.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum BppsStatus bpps_instance_parse(const char *text, struct BppsInstance **out);

/**
 * Generates a random instance with sizes in 1..=99, capacity 100 and
 * scenario membership probability 1/2.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BppsStatus bpps_instance_generate(size_t n,
                                       size_t d,
                                       uint64_t seed,
                                       struct BppsInstance **out);

/**
 * # Safety
 * `instance` must come from this library and not be freed twice. Null is
 * ignored.
 */
void bpps_instance_free(struct BppsInstance *instance);

/**
 * Item count, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t bpps_instance_num_items(const struct BppsInstance *instance);

/**
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t bpps_instance_num_scenarios(const struct BppsInstance *instance);

/**
 * # Safety
 * `instance` must be null or a live handle.
 */
uint32_t bpps_instance_capacity(const struct BppsInstance *instance);

/**
 * Writes the instance in file format; free the string with
 * [`bpps_string_free`].
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum BppsStatus bpps_instance_to_text(const struct BppsInstance *instance, char **out);

/**
 * Best of the continuous and dual-feasible-function lower bounds.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum BppsStatus bpps_lower_bound(const struct BppsInstance *instance, size_t *out);

/**
 * Runs one of the `BPPS_ALGO_*` algorithms. `options` may be null for
 * defaults.
 *
 * # Safety
 * `instance` must be a live handle, `options` null or valid, `out` valid.
 */
enum BppsStatus bpps_solve(const struct BppsInstance *instance,
                           uint32_t algorithm,
                           const struct BppsSolveOptions *options,
                           struct BppsSolution **out);

/**
 * # Safety
 * `solution` must come from this library and not be freed twice. Null is
 * ignored.
 */
void bpps_solution_free(struct BppsSolution *solution);

/**
 * Largest number of bins used by a single scenario, or 0 for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t bpps_solution_value(const struct BppsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t bpps_solution_lower_bound(const struct BppsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
bool bpps_solution_is_optimal(const struct BppsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t bpps_solution_num_bins(const struct BppsSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
double bpps_solution_time(const struct BppsSolution *solution);

/**
 * Writes the 0-based bin index of every item into `out[0..len]`; `len`
 * must equal the item count.
 *
 * # Safety
 * `solution` must be a live handle and `out` valid for `len` writes.
 */
enum BppsStatus bpps_solution_assignment(const struct BppsSolution *solution,
                                         size_t *out,
                                         size_t len);

/**
 * JSON solution record; free the string with [`bpps_string_free`].
 *
 * # Safety
 * Both handles must be live and `solution` must belong to `instance`.
 */
enum BppsStatus bpps_solution_to_json(const struct BppsInstance *instance,
                                      const struct BppsSolution *solution,
                                      char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void bpps_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPPS_H */
