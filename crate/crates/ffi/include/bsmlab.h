#ifndef BSMLAB_H
#define BSMLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. Zero is success.
 */
typedef enum BsmStatus {
  BSM_STATUS_OK = 0,
  BSM_STATUS_NULL_POINTER = 1,
  BSM_STATUS_INVALID_ARGUMENT = 2,
  BSM_STATUS_DIMENSION_MISMATCH = 3,
  BSM_STATUS_ZERO_ROW = 4,
  BSM_STATUS_TOO_LARGE = 5,
  BSM_STATUS_UNSUPPORTED = 6,
  BSM_STATUS_NUMERICAL = 7,
  BSM_STATUS_IO = 8,
  BSM_STATUS_PARSE = 9,
  BSM_STATUS_PANIC = 10,
} BsmStatus;

typedef enum BsmMethod {
  BSM_METHOD_EXACT = 0,
  BSM_METHOD_MONTE_CARLO = 1,
} BsmMethod;

/*
 Opaque row-normalized square matrix.
 */
typedef struct BsmMatrix BsmMatrix;

/*
 A β value with its uncertainty. `seed` is meaningful only when
 `has_seed` is true (Monte Carlo).
 */
typedef struct BsmBetaEstimate {
  double value;
  double std_error;
  uint64_t samples;
  uint64_t seed;
  bool has_seed;
  enum BsmMethod method;
} BsmBetaEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or NULL if none.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *bsm_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *bsm_version(void);

/*
 Builds a matrix from `n * n` row-major entries and normalizes its rows.

 # Safety
 `entries` must point to `n * n` readable doubles; `out` must be writable.
 */
enum BsmStatus bsm_matrix_from_rows(const double *entries, size_t n, struct BsmMatrix **out);

/*
 Builds a named construction: "identity", "random-sign", "oah", "tree",
 "known-optimal" or "hadamard". `seed` is used by "random-sign" only.

 # Safety
 `kind` must be a NUL-terminated string; `out` must be writable.
 */
enum BsmStatus bsm_matrix_construct(const char *kind,
                                    size_t n,
                                    uint64_t seed,
                                    struct BsmMatrix **out);

/*
 Reads a matrix file and normalizes its rows.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BsmStatus bsm_matrix_load(const char *path, struct BsmMatrix **out);

/*
 Releases a matrix. NULL is ignored.

 # Safety
 `m` must come from this library and not be used afterwards.
 */
void bsm_matrix_free(struct BsmMatrix *m);

/*
 Dimension of the matrix, or 0 for NULL.

 # Safety
 `m` must be NULL or a live handle.
 */
size_t bsm_matrix_dim(const struct BsmMatrix *m);

/*
 Copies the row-major entries into `out`, which holds `len` doubles.

 # Safety
 `m` must be a live handle; `out` must point to `len` writable doubles.
 */
enum BsmStatus bsm_matrix_entries(const struct BsmMatrix *m, double *out, size_t len);

/*
 Exact β by enumeration (n ≤ 26).

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum BsmStatus bsm_beta_exact(const struct BsmMatrix *m, struct BsmBetaEstimate *out);

/*
 Monte Carlo β with `samples` draws (at least 2).

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum BsmStatus bsm_beta_monte_carlo(const struct BsmMatrix *m,
                                    uint64_t samples,
                                    uint64_t seed,
                                    struct BsmBetaEstimate *out);

/*
 Cell analysis as a JSON document (report fields plus `sizes`, `ties`,
 `degenerate`). Release the string with [`bsm_string_free`].

 # Safety
 `m` must be a live handle; `out` must be writable.
 */
enum BsmStatus bsm_analyze_json(const struct BsmMatrix *m, char **out);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void bsm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSMLAB_H */
