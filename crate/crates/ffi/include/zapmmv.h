#ifndef ZAPMMV_H
#define ZAPMMV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ZapStatus {
  ZAP_STATUS_OK = 0,
  ZAP_STATUS_NULL_POINTER = 1,
  ZAP_STATUS_INVALID_SHAPE = 2,
  ZAP_STATUS_NON_FINITE = 3,
  ZAP_STATUS_DIMENSION_MISMATCH = 4,
  ZAP_STATUS_NOT_UNDERDETERMINED = 5,
  ZAP_STATUS_SINGULAR_GRAM = 6,
  ZAP_STATUS_NUMERICAL_DIVERGENCE = 7,
  ZAP_STATUS_DEGENERATE_SUPPORT = 8,
  ZAP_STATUS_ZERO_COLUMN = 9,
  ZAP_STATUS_INVALID_PARAMETER = 10,
  ZAP_STATUS_PARSE = 11,
  ZAP_STATUS_IO = 12,
  ZAP_STATUS_BUFFER_TOO_SMALL = 13,
  ZAP_STATUS_OTHER = 14,
  ZAP_STATUS_PANIC = 15,
} ZapStatus;

typedef enum ZapStopReason {
  ZAP_STOP_REASON_STEP_SIZE_FLOOR = 0,
  ZAP_STOP_REASON_ITERATION_BUDGET = 1,
} ZapStopReason;

// Selects a per-iteration trace of a ZAP solve.
typedef enum ZapTrace {
  ZAP_TRACE_PENALTY = 0,
  ZAP_TRACE_KAPPA = 1,
  ZAP_TRACE_FEASIBILITY = 2,
} ZapTrace;

// Dense row-major matrix.
typedef struct ZapMatrix ZapMatrix;

typedef struct ZapSolveResult ZapSolveResult;

typedef struct ZapSompResult ZapSompResult;

// ZAP iteration parameters. Obtain defaults from [`zap_config_default`].
typedef struct ZapSolverConfig {
  double alpha;
  double kappa0;
  double eta;
  size_t q;
  double kappa_min;
  size_t t_max;
} ZapSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *zap_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *zap_version(void);

struct ZapSolverConfig zap_config_default(void);

// Copies `rows * cols` row-major values into a new matrix.
//
// # Safety
// `data` must point to `rows * cols` readable doubles; `out` must be writable.
enum ZapStatus zap_matrix_new(size_t rows, size_t cols, const double *data, struct ZapMatrix **out);

// # Safety
// `m` must be null or a handle from this library that has not been freed.
void zap_matrix_free(struct ZapMatrix *m);

// Row count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t zap_matrix_rows(const struct ZapMatrix *m);

// Column count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t zap_matrix_cols(const struct ZapMatrix *m);

// Writes the row-major entries into `out`, which holds `len` doubles.
//
// # Safety
// `m` must be a live handle and `out` must have room for `len` doubles.
enum ZapStatus zap_matrix_copy_data(const struct ZapMatrix *m, double *out, size_t len);

// Reads a matrix file (`rows,cols` header, then comma-separated rows).
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum ZapStatus zap_matrix_load(const char *path, struct ZapMatrix **out);

// Writes a matrix file at full precision.
//
// # Safety
// `m` must be a live handle and `path` a NUL-terminated string.
enum ZapStatus zap_matrix_save(const struct ZapMatrix *m, const char *path);

// Runs ZAP on `Y = A X`. A null `config` selects the defaults.
//
// # Safety
// `a` and `y` must be live handles, `config` null or readable, `out` writable.
enum ZapStatus zap_solve_mmv(const struct ZapMatrix *a,
                             const struct ZapMatrix *y,
                             const struct ZapSolverConfig *config,
                             struct ZapSolveResult **out);

// # Safety
// `r` must be null or a live handle.
void zap_solve_result_free(struct ZapSolveResult *r);

// New matrix handle holding a copy of the recovered `X`.
//
// # Safety
// `r` must be a live handle and `out` writable.
enum ZapStatus zap_solve_result_solution(const struct ZapSolveResult *r, struct ZapMatrix **out);

// Completed iterations, or 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
size_t zap_solve_result_iterations(const struct ZapSolveResult *r);

// # Safety
// `r` must be a live handle and `out` writable.
enum ZapStatus zap_solve_result_stop_reason(const struct ZapSolveResult *r,
                                            enum ZapStopReason *out);

// Length of every trace (iterations + 1), or 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
size_t zap_solve_result_trace_len(const struct ZapSolveResult *r);

// # Safety
// `r` must be a live handle and `out` must have room for `len` doubles.
enum ZapStatus zap_solve_result_copy_trace(const struct ZapSolveResult *r,
                                           enum ZapTrace which,
                                           double *out,
                                           size_t len);

// Runs simultaneous OMP with at most `k` atoms.
//
// # Safety
// `a` and `y` must be live handles and `out` writable.
enum ZapStatus zap_somp_solve(const struct ZapMatrix *a,
                              const struct ZapMatrix *y,
                              size_t k,
                              double residual_tol,
                              struct ZapSompResult **out);

// # Safety
// `r` must be null or a live handle.
void zap_somp_result_free(struct ZapSompResult *r);

// # Safety
// `r` must be a live handle and `out` writable.
enum ZapStatus zap_somp_result_solution(const struct ZapSompResult *r, struct ZapMatrix **out);

// Number of selected columns, or 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
size_t zap_somp_result_support_len(const struct ZapSompResult *r);

// Selected column indices in selection order.
//
// # Safety
// `r` must be a live handle and `out` must have room for `len` entries.
enum ZapStatus zap_somp_result_copy_support(const struct ZapSompResult *r, size_t *out, size_t len);

// Draws a seeded instance. When `noisy` is false `snr_db` is ignored.
// Any of the three outputs may be null if the caller does not need it.
//
// # Safety
// Non-null output pointers must be writable.
enum ZapStatus zap_generate(size_t n,
                            size_t m,
                            size_t l,
                            size_t k,
                            bool noisy,
                            double snr_db,
                            uint64_t seed,
                            struct ZapMatrix **out_a,
                            struct ZapMatrix **out_y,
                            struct ZapMatrix **out_x);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZAPMMV_H */
