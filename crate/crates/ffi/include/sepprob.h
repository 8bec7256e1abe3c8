/* C interface to the sepprob separability-probability library. */

#ifndef SEPPROB_H
#define SEPPROB_H

/* Generated by cbindgen from sepprob-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Call outcome. Anything other than `Ok` leaves out-parameters untouched.
typedef enum SepStatus {
  SEP_STATUS_OK = 0,
  SEP_STATUS_NULL_POINTER = 1,
  SEP_STATUS_INVALID_ARGUMENT = 2,
  SEP_STATUS_NOT_HERMITIAN = 3,
  SEP_STATUS_TRACE_NOT_ONE = 4,
  SEP_STATUS_NOT_POSITIVE_DEFINITE = 5,
  SEP_STATUS_DIMENSION_MISMATCH = 6,
  SEP_STATUS_NUMERIC_FAILURE = 7,
  SEP_STATUS_INTERNAL_PANIC = 8,
} SepStatus;

// Metric selector mirroring the library's four monotone metrics.
typedef enum SepMetric {
  SEP_METRIC_MINIMAL = 0,
  SEP_METRIC_KMB = 1,
  SEP_METRIC_MAXIMAL = 2,
  SEP_METRIC_IDENTRIC = 3,
} SepMetric;

// Opaque handle to a validated density matrix.
typedef struct SepState SepState;

// Aggregate result of an exact lattice enumeration. Probabilities are
// weighted by the volume element of each monotone metric; `d_*` are the
// weighted average degrees of entanglement.
typedef struct SepEnumerationSummary {
  uint64_t states;
  uint64_t separable;
  double p_minimal;
  double p_kmb;
  double p_maximal;
  double p_identric;
  double d_minimal;
  double d_kmb;
  double d_maximal;
  double d_identric;
} SepEnumerationSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sep_version(void);

// Build a density matrix from row-major real and imaginary parts of an
// n×n matrix (n = dim_a·dim_b). Validates Hermiticity, unit trace and
// strict positivity; on success `*out` owns a new handle.
//
// # Safety
// `re` and `im` must point to `n*n` readable doubles; `out` must be a valid
// pointer. The handle must be released with [`sep_state_free`].
enum SepStatus sep_state_new(const double *re,
                             const double *im,
                             size_t dim_a,
                             size_t dim_b,
                             struct SepState **out);

// Release a handle created by this library. NULL is a no-op.
//
// # Safety
// `state` must be a pointer returned by [`sep_state_new`] (or NULL) that has
// not already been freed.
void sep_state_free(struct SepState *state);

// Peres–Horodecki test: `*ppt` is true when the partial transpose is
// positive; `*min_pt_eigenvalue` receives its smallest eigenvalue.
//
// # Safety
// `state` must be a live handle; out-pointers must be valid.
enum SepStatus sep_state_is_ppt(const struct SepState *state, bool *ppt, double *min_pt_eigenvalue);

// Participation ratio R = 1/Tr(ρ²).
//
// # Safety
// `state` must be a live handle; `out` must be valid.
enum SepStatus sep_state_participation_ratio(const struct SepState *state, double *out);

// Degree of entanglement Σ|λ'| − 1 over the partial-transpose spectrum.
//
// # Safety
// `state` must be a live handle; `out` must be valid.
enum SepStatus sep_state_degree_of_entanglement(const struct SepState *state, double *out);

// Eigenvalues in ascending order, written to `out[0..n]`.
//
// # Safety
// `state` must be a live handle; `out` must hold `dim_a*dim_b` doubles.
enum SepStatus sep_state_spectrum(const struct SepState *state, double *out);

// Morozova–Chentsov kernel f(a, b) of the chosen metric.
//
// # Safety
// `out` must be a valid pointer.
enum SepStatus sep_mc_function(enum SepMetric metric, double a, double b, double *out);

// Volume-element weight of a strictly positive spectrum of length `n`.
//
// # Safety
// `eigs` must point to `n` readable doubles; `out` must be valid.
enum SepStatus sep_volume_weight(enum SepMetric metric, const double *eigs, size_t n, double *out);

// Monte Carlo estimate of the separability probability under the product
// measure with symmetric Dirichlet(ν) eigenvalues. For systems larger than
// 2x3 the estimate is a PPT pass rate, an upper bound on separability.
//
// # Safety
// Out-pointers must be valid.
enum SepStatus sep_product_sample_estimate(size_t dim_a,
                                           size_t dim_b,
                                           double nu,
                                           uint64_t samples,
                                           uint64_t seed,
                                           double *p_hat,
                                           double *stderr_out,
                                           uint64_t *separable);

// Exact lattice enumeration with all four metric weights.
// `det_threshold` is an exact rational string like "1/2560000"; NULL means
// zero. Runs on the global thread pool; fine resolutions take minutes.
//
// # Safety
// `det_threshold` must be NULL or a NUL-terminated string; `out` must be a
// valid pointer.
enum SepStatus sep_enumerate(size_t dim_a,
                             size_t dim_b,
                             uint32_t n1,
                             uint32_t n2,
                             const char *det_threshold,
                             bool use_symmetry,
                             struct SepEnumerationSummary *out);

// Size and minimum modulus of the off-diagonal trial grid at resolution n2.
//
// # Safety
// Out-pointers must be valid.
enum SepStatus sep_disc_grid_info(uint32_t n2, size_t *points, double *min_modulus);

// Number of simplex lattice points: C(n1 + parts − 1, parts − 1).
//
// # Safety
// `count` must be a valid pointer.
enum SepStatus sep_simplex_point_count(uint32_t n1, uint32_t parts, uint64_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEPPROB_H */
