#ifndef TFKIT_H
#define TFKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TfkitStatus {
  TFKIT_STATUS_OK = 0,
  TFKIT_STATUS_NULL_POINTER = 1,
  TFKIT_STATUS_INVALID_UTF8 = 2,
  TFKIT_STATUS_INVALID_ARGUMENT = 3,
  TFKIT_STATUS_SPACE_MISMATCH = 4,
  TFKIT_STATUS_INVALID_DOCUMENT = 5,
  TFKIT_STATUS_HYPOTHESIS_FAILED = 6,
  TFKIT_STATUS_UNBOUNDED = 7,
  TFKIT_STATUS_TOO_LARGE = 8,
  TFKIT_STATUS_PANIC = 9,
} TfkitStatus;

typedef enum TfkitNorm {
  TFKIT_NORM_L1 = 0,
  TFKIT_NORM_L2 = 1,
  TFKIT_NORM_LINF = 2,
} TfkitNorm;

/**
 * A signed measure on `{0, ..., n-1}`. Positive measures are the ones with
 * nonnegative masses.
 */
typedef struct TfkitMeasure TfkitMeasure;

typedef struct TfkitTransfunction TfkitTransfunction;

/**
 * A measure with values in `R^d` under a chosen norm.
 */
typedef struct TfkitVectorMeasure TfkitVectorMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tfkit_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void tfkit_string_free(char *s);

/**
 * Signed measure with `mass[a]` on atom `a`, `a < count`.
 *
 * # Safety
 * `mass` must point to `count` doubles; `out` must be writable.
 */
enum TfkitStatus tfkit_measure_new(const double *mass, size_t count, struct TfkitMeasure **out);

/**
 * # Safety
 * `m` must be null or a handle from this library, not yet freed.
 */
void tfkit_measure_free(struct TfkitMeasure *m);

/**
 * Number of atoms, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t tfkit_measure_len(const struct TfkitMeasure *m);

/**
 * Copies the masses into `out`, which must hold `tfkit_measure_len(m)` doubles.
 *
 * # Safety
 * `m` must be a live handle; `out` must have room for `len` doubles.
 */
enum TfkitStatus tfkit_measure_mass(const struct TfkitMeasure *m, double *out, size_t len);

/**
 * Total variation norm `Σ |μ(a)|`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum TfkitStatus tfkit_measure_norm(const struct TfkitMeasure *m, double *out);

/**
 * Splits `m` into its positive and negative parts.
 *
 * # Safety
 * `m` must be a live handle; `positive` and `negative` must be writable.
 */
enum TfkitStatus tfkit_measure_jordan(const struct TfkitMeasure *m,
                                      struct TfkitMeasure **positive,
                                      struct TfkitMeasure **negative);

/**
 * Vector measure with `values[a * dim .. (a + 1) * dim]` on atom `a`.
 *
 * # Safety
 * `values` must point to `count * dim` doubles; `out` must be writable.
 */
enum TfkitStatus tfkit_vector_measure_new(const double *values,
                                          size_t count,
                                          size_t dim,
                                          enum TfkitNorm norm,
                                          struct TfkitVectorMeasure **out);

/**
 * # Safety
 * `v` must be null or a handle from this library, not yet freed.
 */
void tfkit_vector_measure_free(struct TfkitVectorMeasure *v);

/**
 * `|ω|` as a (positive) measure handle.
 *
 * # Safety
 * `v` must be a live handle; `out` must be writable.
 */
enum TfkitStatus tfkit_total_variation(const struct TfkitVectorMeasure *v,
                                       struct TfkitMeasure **out);

/**
 * Kernel transfunction from a row-major `rows × cols` nonnegative matrix.
 *
 * # Safety
 * `matrix` must point to `rows * cols` doubles; `out` must be writable.
 */
enum TfkitStatus tfkit_transfunction_kernel(const double *matrix,
                                            size_t rows,
                                            size_t cols,
                                            struct TfkitTransfunction **out);

/**
 * Pushforward along `map`, sending atom `a` to `map[a] < codomain`.
 *
 * # Safety
 * `map` must point to `domain` entries; `out` must be writable.
 */
enum TfkitStatus tfkit_transfunction_pushforward(const size_t *map,
                                                 size_t domain,
                                                 size_t codomain,
                                                 struct TfkitTransfunction **out);

/**
 * `μ ↦ μ(X) · uniform`: norm preserving on positives, not on signed measures.
 *
 * # Safety
 * `out` must be writable.
 */
enum TfkitStatus tfkit_transfunction_uniform_spread(size_t domain,
                                                    size_t codomain,
                                                    struct TfkitTransfunction **out);

/**
 * # Safety
 * `t` must be null or a handle from this library, not yet freed.
 */
void tfkit_transfunction_free(struct TfkitTransfunction *t);

/**
 * `Φμ` for a measure with nonnegative masses.
 *
 * # Safety
 * `t` and `m` must be live handles; `out` must be writable.
 */
enum TfkitStatus tfkit_transfunction_apply(const struct TfkitTransfunction *t,
                                           const struct TfkitMeasure *m,
                                           struct TfkitMeasure **out);

/**
 * `Φμ⁺ − Φμ⁻`.
 *
 * # Safety
 * `t` and `m` must be live handles; `out` must be writable.
 */
enum TfkitStatus tfkit_extend_signed(const struct TfkitTransfunction *t,
                                     const struct TfkitMeasure *m,
                                     struct TfkitMeasure **out);

/**
 * Operator norm of `t`. `exact` is set when the value is exact rather than
 * a sampled lower bound; sampling uses `seed` and `trials`.
 *
 * # Safety
 * `t` must be a live handle; `value` and `exact` must be writable.
 */
enum TfkitStatus tfkit_operator_norm(const struct TfkitTransfunction *t,
                                     uint64_t seed,
                                     size_t trials,
                                     double *value,
                                     bool *exact);

/**
 * Runs a CLI command on a JSON job document (null for commands without
 * input) and returns the JSON report, to be freed with
 * [`tfkit_string_free`]. `exit_code` receives the CLI exit code; a report
 * is produced for invalid documents too.
 *
 * # Safety
 * `command` must be a NUL-terminated string; `document` null or one;
 * `report` and `exit_code` must be writable.
 */
enum TfkitStatus tfkit_run_job(const char *command,
                               const char *document,
                               char **report,
                               int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFKIT_H */
