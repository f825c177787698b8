#ifndef LENSVAR_H
#define LENSVAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which matrix [`lv_summary_matrix`] copies.
 */
typedef enum LvMatrix {
  /**
   * Residues, `k × n`.
   */
  LV_MATRIX_ETA = 0,
  /**
   * First-order coefficients, `k × n`.
   */
  LV_MATRIX_JACOBIAN = 1,
  /**
   * Constant term, `k × 1`.
   */
  LV_MATRIX_CORE = 2,
} LvMatrix;

/**
 * Result code of every fallible call.
 */
typedef enum LvStatus {
  LV_STATUS_OK = 0,
  LV_STATUS_NULL_POINTER = 1,
  LV_STATUS_INVALID_UTF8 = 2,
  LV_STATUS_PARSE = 3,
  LV_STATUS_PRECONDITION = 4,
  LV_STATUS_BUFFER_TOO_SMALL = 5,
  LV_STATUS_PANIC = 6,
} LvStatus;

/**
 * Parsed expression handle.
 */
typedef struct LvExpr LvExpr;

/**
 * Spectral summary handle.
 */
typedef struct LvSummary LvSummary;

/**
 * Scalar fields of a summary.
 */
typedef struct LvScalars {
  double lambda;
  double variance;
  double variance_model;
  double tail_energy;
  double sigma_bound;
  double est_error;
  size_t grid_n;
  /**
   * Components `k`.
   */
  size_t k;
  /**
   * Variables `n`.
   */
  size_t n;
} LvScalars;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lv_version(void);

/**
 * Copies the calling thread's last error message into `buf`. The stored
 * message is kept, so a sizing call can be followed by the real copy.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes; `needed` null or writable.
 */
enum LvStatus lv_last_error(char *buf, size_t cap, size_t *needed);

/**
 * Parses `text` as a function of `n` variables.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum LvStatus lv_expr_parse(const char *text, uint32_t n, struct LvExpr **out);

/**
 * # Safety
 * `expr` must be null or a handle from [`lv_expr_parse`] not yet freed.
 */
void lv_expr_free(struct LvExpr *expr);

/**
 * Number of variables and components of `expr`.
 *
 * # Safety
 * `expr` must be a live handle; `n` and `k` null or writable.
 */
enum LvStatus lv_expr_shape(const struct LvExpr *expr, size_t *n, size_t *k);

/**
 * Evaluates `expr` at the point `(re[j] + i im[j])`, `j < n`, writing the
 * `k` components to `out_re`/`out_im`.
 *
 * # Safety
 * Input arrays must hold `n` values and output arrays `k` values, matching
 * [`lv_expr_shape`].
 */
enum LvStatus lv_expr_eval(const struct LvExpr *expr,
                           const double *re,
                           const double *im,
                           size_t n,
                           double *out_re,
                           double *out_im,
                           size_t k);

/**
 * Spectral summary of `expr` on the torus of radius `lambda`.
 *
 * # Safety
 * `expr` must be a live handle and `out` writable.
 */
enum LvStatus lv_analyze(const struct LvExpr *expr, double lambda, struct LvSummary **out);

/**
 * # Safety
 * `summary` must be null or a handle from [`lv_analyze`] not yet freed.
 */
void lv_summary_free(struct LvSummary *summary);

/**
 * # Safety
 * `summary` must be a live handle and `out` writable.
 */
enum LvStatus lv_summary_scalars(const struct LvSummary *summary, struct LvScalars *out);

/**
 * Copies the matrix selected by `which` (an [`LvMatrix`] value) row-major
 * into `re`/`im`, each of capacity `cap`; `needed` receives the entry count.
 *
 * # Safety
 * `summary` must be a live handle; `re`/`im` valid for `cap` values or
 * null when sizing; `needed` null or writable.
 */
enum LvStatus lv_summary_matrix(const struct LvSummary *summary,
                                uint32_t which,
                                double *re,
                                double *im,
                                size_t cap,
                                size_t *needed);

/**
 * Summary as JSON text with a trailing NUL.
 *
 * # Safety
 * `summary` must be a live handle; `buf` valid for `cap` bytes or null when
 * sizing; `needed` null or writable.
 */
enum LvStatus lv_summary_json(const struct LvSummary *summary,
                              char *buf,
                              size_t cap,
                              size_t *needed);

/**
 * Exterior measure of the slice given as interval text such as `"0:pi/2"`.
 *
 * # Safety
 * `interval` must be a NUL-terminated string and `out` writable.
 */
enum LvStatus lv_slice_measure(const char *interval, double lambda, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LENSVAR_H */
