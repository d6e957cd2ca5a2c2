/*
 * sdd — spline dimensional decomposition for uncertainty quantification.
 *
 * C interface to the shared library. All objects are opaque handles owned
 * by the caller and released with the matching *_free function. Functions
 * that can fail return sdd_status (or NULL for constructors); the message
 * for the most recent failure on the calling thread is available from
 * sdd_last_error().
 */

#ifndef SDD_H
#define SDD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdd_status {
    SDD_OK = 0,
    SDD_ERR_ARGUMENT = 1,     /* invalid argument or configuration */
    SDD_ERR_DOMAIN = 2,       /* evaluation point outside the support */
    SDD_ERR_CONDITIONING = 3, /* moment matrix numerically not positive definite */
    SDD_ERR_UNSUPPORTED = 4,  /* request outside supported limits */
    SDD_ERR_IO = 5,           /* file or document failure */
    SDD_ERR_INTERNAL = 6
} sdd_status;

const char* sdd_version(void);
const char* sdd_last_error(void); /* never NULL; empty when no failure yet */
sdd_status sdd_last_status(void); /* status of the most recent failure on this thread */

typedef struct sdd_measure sdd_measure;
typedef struct sdd_knots sdd_knots;
typedef struct sdd_basis sdd_basis;
typedef struct sdd_expansion sdd_expansion;
typedef struct sdd_bench sdd_bench;

/* ---- input measures -------------------------------------------------- */

sdd_measure* sdd_measure_uniform(double a, double b);
sdd_measure* sdd_measure_truncated_gaussian(double a, double b, double mean, double stddev);
sdd_measure* sdd_measure_beta(double a, double b, double alpha, double beta);
void sdd_measure_free(sdd_measure* measure);

sdd_status sdd_measure_support(const sdd_measure* measure, double* a, double* b);
/* 1 when family, support, and parameters are identical */
int sdd_measure_equal(const sdd_measure* left, const sdd_measure* right);
sdd_status sdd_measure_density(const sdd_measure* measure, double x, double* out);
sdd_status sdd_measure_cdf(const sdd_measure* measure, double x, double* out);
sdd_status sdd_measure_raw_moment(const sdd_measure* measure, int order, double* out);
/* inverse CDF at u in [0, 1] */
sdd_status sdd_measure_sample(const sdd_measure* measure, double u, double* out);

/* Composite Gauss rule with the density folded into the weights, split at
 * the sorted interior breakpoints. Call with nodes == NULL to query the
 * node count. */
sdd_status sdd_measure_quadrature(const sdd_measure* measure, const double* breakpoints,
                                  size_t n_breakpoints, int points_per_element, double* nodes,
                                  double* weights, size_t* count);

/* Seeded input matrix (count x dimension, row-major) drawn by inverse CDF
 * from deterministic per-coordinate streams. */
sdd_status sdd_sample_inputs(const sdd_measure* const* measures, int dimension, uint64_t count,
                             uint64_t seed, int threads, double* out);

/* ---- knot sequences --------------------------------------------------- */

/* Uniformly spaced distinct knots, (p+1)-open ends. Interior multiplicities
 * default to 1; override entries give (position in 1..elements-1, value). */
sdd_knots* sdd_knots_open_uniform(double a, double b, int degree, int elements,
                                  const int* mult_positions, const int* mult_values,
                                  size_t n_overrides);
sdd_knots* sdd_knots_from_array(const double* knots, size_t count, int degree);
void sdd_knots_free(sdd_knots* knots);

int sdd_knots_degree(const sdd_knots* knots);
int sdd_knots_basis_count(const sdd_knots* knots);
int sdd_knots_element_count(const sdd_knots* knots);
double sdd_knots_mesh_size(const sdd_knots* knots);
size_t sdd_knots_size(const sdd_knots* knots);
sdd_status sdd_knots_values(const sdd_knots* knots, double* out);

/* ---- standard B-splines ----------------------------------------------- */

/* B_{index,p}(x); index is zero-based */
sdd_status sdd_bspline_eval(const sdd_knots* knots, int index, double x, double* out);
/* all basis values at x; out has basis_count entries */
sdd_status sdd_bspline_eval_all(const sdd_knots* knots, double x, double* out);

/* ---- measure-consistent orthonormal basis ----------------------------- */

/* points_per_element <= 0 selects the default quadrature order */
sdd_basis* sdd_basis_create(const sdd_knots* knots, const sdd_measure* measure,
                            int points_per_element);
void sdd_basis_free(sdd_basis* basis);

int sdd_basis_size(const sdd_basis* basis);
sdd_status sdd_basis_eval(const sdd_basis* basis, double x, double* out);
/* lower-triangular whitening factor, row-major n*n; basis values solve
 * factor * psi(x) = (1, B_2(x), ..., B_n(x)) */
sdd_status sdd_basis_whitening(const sdd_basis* basis, double* out);

/* ---- expansions -------------------------------------------------------- */

typedef double (*sdd_output_fn)(const double* x, int dimension, void* user);

/* Number of expansion coefficients including the constant for the given
 * per-coordinate basis sizes and interaction order. */
sdd_status sdd_term_count(const int* basis_counts, int dimension, int order, int64_t* out);

/* Projection coefficients by tensor-product quadrature (dimension <= 6).
 * breakpoints may be NULL, or an array of per-coordinate arrays with sizes
 * in n_breakpoints, declaring nonsmooth loci of the integrand.
 * points_per_element <= 0 selects a default. */
sdd_expansion* sdd_fit_quadrature(const sdd_basis* const* bases, int dimension, int order,
                                  sdd_output_fn output, void* user,
                                  const double* const* breakpoints, const size_t* n_breakpoints,
                                  int points_per_element, int threads);

/* Least-squares fit to count samples (inputs row-major count x dimension).
 * min_oversampling <= 0 selects the default policy (2x coefficients).
 * condition_estimate may be NULL. */
sdd_expansion* sdd_fit_regression(const sdd_basis* const* bases, int dimension, int order,
                                  const double* inputs, const double* outputs, size_t count,
                                  double ridge, double min_oversampling, int threads,
                                  double* condition_estimate);

void sdd_expansion_free(sdd_expansion* expansion);

int sdd_expansion_dimension(const sdd_expansion* expansion);
int sdd_expansion_order(const sdd_expansion* expansion);
size_t sdd_expansion_term_count(const sdd_expansion* expansion); /* excluding constant */
double sdd_expansion_mean(const sdd_expansion* expansion);
double sdd_expansion_variance(const sdd_expansion* expansion);
sdd_status sdd_expansion_eval(const sdd_expansion* expansion, const double* x, double* out);

/* Term query. coords receives zero-based coordinates, indices zero-based
 * basis indices (>= 1; the constant element is excluded). Buffers hold up
 * to `capacity` entries; *size reports the subset cardinality. Buffers may
 * be NULL to query sizes only. */
sdd_status sdd_expansion_term(const sdd_expansion* expansion, size_t term, int* coords,
                              int* indices, size_t capacity, size_t* size, double* coeff);

/* Sorted surrogate Monte Carlo samples; identical seeds give identical
 * results regardless of thread count. */
sdd_status sdd_expansion_sample_sorted(const sdd_expansion* expansion, uint64_t count,
                                       uint64_t seed, int threads, double* out);

sdd_status sdd_expansion_save(const sdd_expansion* expansion, const char* path);
sdd_expansion* sdd_expansion_load(const char* path);
char* sdd_expansion_to_json(const sdd_expansion* expansion); /* free with sdd_string_free */
sdd_expansion* sdd_expansion_from_json(const char* text);
void sdd_string_free(char* text);

/* ---- benchmark registry ------------------------------------------------ */

/* Borrowed pointer into the static registry; do not free. NULL if unknown. */
const sdd_bench* sdd_bench_find(const char* name);
int sdd_bench_dimension(const sdd_bench* bench);
sdd_status sdd_bench_eval(const sdd_bench* bench, const double* x, double* out);
int sdd_bench_has_exact_statistics(const sdd_bench* bench);
double sdd_bench_exact_mean(const sdd_bench* bench);
double sdd_bench_exact_variance(const sdd_bench* bench);
/* declared nonsmooth loci for one coordinate; two-call protocol as above */
sdd_status sdd_bench_breakpoints(const sdd_bench* bench, int coordinate, double* out,
                                 size_t capacity, size_t* count);
/* fresh handle for the benchmark's reference input law on one coordinate */
sdd_measure* sdd_bench_measure(const sdd_bench* bench, int coordinate);

/* ---- self verification -------------------------------------------------- */

typedef void (*sdd_check_report_fn)(const char* name, int passed, const char* detail, void* user);
/* Runs the built-in invariant checks, reporting each through the callback
 * (which may be NULL). Returns the number of failed checks, or -1 on
 * internal failure. */
int sdd_verify(sdd_check_report_fn report, void* user, int threads);

#ifdef __cplusplus
}
#endif

#endif /* SDD_H */
