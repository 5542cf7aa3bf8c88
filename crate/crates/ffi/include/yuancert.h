#ifndef YUANCERT_H
#define YUANCERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum YcStatus {
  YC_STATUS_OK = 0,
  YC_STATUS_NULL_POINTER = 1,
  YC_STATUS_INVALID_INPUT = 2,
  YC_STATUS_HYPOTHESIS_VIOLATED = 3,
  YC_STATUS_NUMERICAL_FAILURE = 4,
  // The requested field is absent for this verdict (e.g. weights of a
  // refutation).
  YC_STATUS_NOT_AVAILABLE = 5,
  YC_STATUS_BUFFER_TOO_SMALL = 6,
  YC_STATUS_PANIC = 7,
} YcStatus;

typedef enum YcVerdict {
  YC_VERDICT_CERTIFIED = 0,
  YC_VERDICT_REFUTED = 1,
  YC_VERDICT_HYPOTHESIS_VIOLATED = 2,
} YcVerdict;

// A family of symmetric matrices of one order, with an optional cone
// (default: the whole space).
typedef struct YcFamily YcFamily;

typedef struct YcReport YcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *yc_version(void);

// Message describing the last failure on this thread, or NULL after a
// success. The pointer stays valid until the next `yc_*` call on the same
// thread.
const char *yc_last_error(void);

// Creates an empty family of order `n` whose cone is the whole space.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum YcStatus yc_family_new(size_t n, struct YcFamily **out);

// Appends a symmetric member given as `n × n` row-major entries.
//
// # Safety
// `family` must come from `yc_family_new`; `entries` must point to `n²`
// readable doubles.
enum YcStatus yc_family_push(struct YcFamily *family, const double *entries);

// Number of members pushed so far (0 for a NULL handle).
//
// # Safety
// `family` must be NULL or come from `yc_family_new`.
size_t yc_family_len(const struct YcFamily *family);

// Restricts the family to the cone spanned by `k` subspace vectors (`k × n`
// row-major, may be NULL when `k = 0`) plus the ray `ray` (`n` doubles, or
// NULL for none).
//
// # Safety
// `family` must come from `yc_family_new`; the arrays must be readable
// for the stated lengths.
enum YcStatus yc_family_set_cone(struct YcFamily *family,
                                 const double *subspace,
                                 size_t k,
                                 const double *ray);

// Canonical JSON instance for the family (free with `yc_string_free`).
// Reports produced from this family carry the SHA-256 of exactly these
// bytes, so writing them to a file lets the command-line tool verify the
// reports.
//
// # Safety
// `family` must come from `yc_family_new`; `out` must be writable.
enum YcStatus yc_family_to_json(const struct YcFamily *family, char **out);

// # Safety
// `family` must be NULL or come from `yc_family_new` and not be used
// afterwards.
void yc_family_free(struct YcFamily *family);

// Certificate or refutation for a family of set rank at most two on its
// cone. A family of higher rank yields a report with verdict
// `HypothesisViolated`, not an error.
//
// # Safety
// `family` must come from `yc_family_new`; `out` must be writable. The
// report is released with `yc_report_free`.
enum YcStatus yc_certify(const struct YcFamily *family, struct YcReport **out);

// Two-member certificate; the family must have exactly two members.
//
// # Safety
// As for `yc_certify`.
enum YcStatus yc_yuan_two(const struct YcFamily *family, struct YcReport **out);

// Certificate for minimizing `z` subject to `½xᵀAᵢx ≤ z` at the origin,
// using the family's members as `Aᵢ`. The cone is ignored.
//
// # Safety
// As for `yc_certify`.
enum YcStatus yc_theorem4_certificate(const struct YcFamily *family, struct YcReport **out);

// Dimension of the span of `count` general (not necessarily symmetric)
// `n × n` matrices stored back to back in row-major order.
//
// # Safety
// `entries` must point to `count · n²` readable doubles and `rank` must be
// writable.
enum YcStatus yc_matrix_set_rank(const double *entries,
                                 size_t n,
                                 size_t count,
                                 double tol,
                                 size_t *rank);

// # Safety
// `report` must come from one of the certificate functions and `verdict`
// must be writable.
enum YcStatus yc_report_verdict(const struct YcReport *report, enum YcVerdict *verdict);

// Copies the simplex weights of a certified report into `buf` (capacity
// `cap`) and stores their count in `len`. With a short buffer, `len` is
// still set and `BufferTooSmall` is returned.
//
// # Safety
// `report` must be a live report; `buf` must be writable for `cap` doubles
// and `len` must be writable.
enum YcStatus yc_report_weights(const struct YcReport *report,
                                double *buf,
                                size_t cap,
                                size_t *len);

// Copies the witness direction of a refuted report; see
// `yc_report_weights` for the buffer protocol.
//
// # Safety
// As for `yc_report_weights`.
enum YcStatus yc_report_witness(const struct YcReport *report,
                                double *buf,
                                size_t cap,
                                size_t *len);

// Smallest eigenvalue of the certified combination on the cone.
//
// # Safety
// `report` must be a live report and `value` writable.
enum YcStatus yc_report_lambda_min(const struct YcReport *report, double *value);

// The report in the command-line tool's JSON format (free with
// `yc_string_free`).
//
// # Safety
// `report` must be a live report and `out` writable.
enum YcStatus yc_report_to_json(const struct YcReport *report, char **out);

// # Safety
// `report` must be NULL or a live report not used afterwards.
void yc_report_free(struct YcReport *report);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a string from a `yc_*_to_json` call, freed once.
void yc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YUANCERT_H */
