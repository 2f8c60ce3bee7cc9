#ifndef BERGMAN_H
#define BERGMAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum BergmanStatus {
  BERGMAN_STATUS_OK = 0,
  BERGMAN_STATUS_NULL_POINTER = 1,
  /*
   Argument outside the domain of the operation.
   */
  BERGMAN_STATUS_DOMAIN = 2,
  BERGMAN_STATUS_PARSE = 3,
  BERGMAN_STATUS_NON_CONVERGENCE = 4,
  BERGMAN_STATUS_INTEGRATION = 5,
  BERGMAN_STATUS_LOG_SINGULARITY = 6,
  BERGMAN_STATUS_LENGTH_MISMATCH = 7,
  BERGMAN_STATUS_DEGREE_OVERFLOW = 8,
  BERGMAN_STATUS_UNDER_RESOLVED = 9,
  BERGMAN_STATUS_WEIGHT_REJECTED = 10,
  BERGMAN_STATUS_CONFIG = 11,
  BERGMAN_STATUS_UNKNOWN_EXPERIMENT = 12,
  BERGMAN_STATUS_IO = 13,
  /*
   A string argument was not valid UTF-8.
   */
  BERGMAN_STATUS_INVALID_UTF8 = 14,
  BERGMAN_STATUS_BUFFER_TOO_SMALL = 15,
  BERGMAN_STATUS_PANIC = 16,
} BergmanStatus;

/*
 Opaque coefficient multiplier `R^{ω,ν}` prepared up to a fixed degree.
 */
typedef struct BergmanFracDerivative BergmanFracDerivative;

/*
 Opaque truncated power series.
 */
typedef struct BergmanSeries BergmanSeries;

/*
 Opaque radial weight.
 */
typedef struct BergmanWeight BergmanWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *bergman_version(void);

/*
 Copies the calling thread's last error message (empty after a success).

 # Safety
 `buf` must be valid for `cap` bytes; `needed` null or valid.
 */
enum BergmanStatus bergman_last_error_message(char *buf, size_t cap, size_t *needed);

/*
 Parses a weight from the weight mini-language, e.g. `std:alpha=1` or
 `zero:[0.3,0.4]:std:alpha=1`.

 # Safety
 `spec` must be a NUL-terminated string; `out` valid for writes.
 */
enum BergmanStatus bergman_weight_parse(const char *spec, struct BergmanWeight **out);

/*
 Releases a weight. Null is ignored.

 # Safety
 `w` must be null or a handle from this library not yet freed.
 */
void bergman_weight_free(struct BergmanWeight *w);

/*
 Writes the canonical spec of `w`.

 # Safety
 `w` a live handle; buffer convention as in the module docs.
 */
enum BergmanStatus bergman_weight_label(const struct BergmanWeight *w,
                                        char *buf,
                                        size_t cap,
                                        size_t *needed);

/*
 `ω(r)`.

 # Safety
 `w` a live handle, `out` valid for writes.
 */
enum BergmanStatus bergman_weight_eval(const struct BergmanWeight *w, double r, double *out);

/*
 `ω̂(r) = ∫_r^1 ω(s) ds`.

 # Safety
 `w` a live handle, `out` valid for writes.
 */
enum BergmanStatus bergman_weight_tail(const struct BergmanWeight *w, double r, double *out);

/*
 Moments `ω_0 … ω_{max_index}` (that is, `max_index + 1` values).

 # Safety
 `w` a live handle; buffer convention as in the module docs.
 */
enum BergmanStatus bergman_weight_moments(const struct BergmanWeight *w,
                                          size_t max_index,
                                          double *buf,
                                          size_t cap,
                                          size_t *needed);

/*
 Classification report of `w` with lower-doubling parameter `k` as JSON.

 # Safety
 `w` a live handle; buffer convention as in the module docs.
 */
enum BergmanStatus bergman_weight_classify_json(const struct BergmanWeight *w,
                                                double k,
                                                char *buf,
                                                size_t cap,
                                                size_t *needed);

/*
 Series with coefficients `re[k] + i·im[k]`, `k < len`. `im` may be null
 for real coefficients.

 # Safety
 `re` (and `im` when non-null) valid for `len` reads; `out` for writes.
 */
enum BergmanStatus bergman_series_new(const double *re,
                                      const double *im,
                                      size_t len,
                                      struct BergmanSeries **out);

/*
 Parses `poly:[...]`, `logfn@N` or `geom@N`.

 # Safety
 `literal` NUL-terminated; `out` valid for writes.
 */
enum BergmanStatus bergman_series_parse(const char *literal, struct BergmanSeries **out);

/*
 Releases a series. Null is ignored.

 # Safety
 `s` must be null or a handle from this library not yet freed.
 */
void bergman_series_free(struct BergmanSeries *s);

/*
 Degree `N` (the series holds `N + 1` coefficients).

 # Safety
 `s` a live handle, `out` valid for writes.
 */
enum BergmanStatus bergman_series_degree(const struct BergmanSeries *s, size_t *out);

/*
 Coefficients split into real and imaginary parts; both buffers follow the
 buffer convention with the same capacity.

 # Safety
 `s` a live handle; `re`, `im` valid for `cap` writes; `needed` null or valid.
 */
enum BergmanStatus bergman_series_coeffs(const struct BergmanSeries *s,
                                         double *re,
                                         double *im,
                                         size_t cap,
                                         size_t *needed);

/*
 `f(z)` for `|z| < 1`.

 # Safety
 `s` a live handle; `out_re`, `out_im` valid for writes.
 */
enum BergmanStatus bergman_series_eval(const struct BergmanSeries *s,
                                       double re,
                                       double im,
                                       double *out_re,
                                       double *out_im);

/*
 Prepares `R^{ω,ν}` for series of degree at most `degree`.

 # Safety
 `omega`, `nu` live handles; `out` valid for writes.
 */
enum BergmanStatus bergman_fracd_new(const struct BergmanWeight *omega,
                                     const struct BergmanWeight *nu,
                                     size_t degree,
                                     struct BergmanFracDerivative **out);

/*
 Releases a fractional derivative. Null is ignored.

 # Safety
 `r` must be null or a handle from this library not yet freed.
 */
void bergman_fracd_free(struct BergmanFracDerivative *r);

/*
 `R^{ω,ν} f` as a new series.

 # Safety
 `r`, `f` live handles; `out` valid for writes.
 */
enum BergmanStatus bergman_fracd_apply(const struct BergmanFracDerivative *r,
                                       const struct BergmanSeries *f,
                                       struct BergmanSeries **out);

/*
 `R^{ω,ν} f(z)` through the integral form `⟨f, B_z^ν⟩_ω`, independent of
 the multiplier path.

 # Safety
 Handles live; outputs valid for writes.
 */
enum BergmanStatus bergman_fracd_integral_form(const struct BergmanWeight *omega,
                                               const struct BergmanWeight *nu,
                                               const struct BergmanSeries *f,
                                               double re,
                                               double im,
                                               double *out_re,
                                               double *out_im);

/*
 Projects the bounded pre-image `g_α = (1 − |z|)^α R^{ω,ω_α} h` back onto
 polynomials of degree `deg h`. With `radial == 0` the projection is taken
 in factored form; otherwise `g_α` is sampled on a polar grid with
 `radial` nodes and `angles` angles first. `force != 0` skips the
 classifier gate.

 # Safety
 Handles live; `out` valid for writes.
 */
enum BergmanStatus bergman_preimage_roundtrip(const struct BergmanWeight *omega,
                                              const struct BergmanSeries *h,
                                              double alpha,
                                              int32_t force,
                                              size_t radial,
                                              size_t angles,
                                              struct BergmanSeries **out);

/*
 `(1 − |z|²)‖∂_z̄ B_z^ω‖_{A¹_ν}` at `z = modulus ∈ (0, 1)`.

 # Safety
 Handles live; `out` valid for writes.
 */
enum BergmanStatus bergman_dbar_kernel_norm(const struct BergmanWeight *omega,
                                            const struct BergmanWeight *nu,
                                            double modulus,
                                            size_t radial,
                                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BERGMAN_H */
