/*
 * C interface to the errors-in-variables slope library.
 *
 * Objects are opaque handles created by eiv_*_create/build functions and
 * released with the matching eiv_*_free. Every fallible call returns an
 * eiv_status; on failure a human-readable message is available from
 * eiv_last_error() on the calling thread until the next failing call.
 * Output structs are written only on success.
 */
#ifndef EIV_EIV_H
#define EIV_EIV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EIV_BUILDING_LIBRARY)
#    define EIV_API __declspec(dllexport)
#  else
#    define EIV_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__)
#  define EIV_API __attribute__((visibility("default")))
#else
#  define EIV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eiv_status {
  EIV_OK = 0,
  EIV_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum, undersized buffer */
  EIV_ERR_DOMAIN = 2,
  EIV_ERR_NONCONVERGENCE = 3,
  EIV_ERR_QUADRATURE = 4,
  EIV_ERR_TOO_FEW_POINTS = 5,
  EIV_ERR_DEGENERATE_VARIANCE = 6,
  EIV_ERR_PERFECT_CORRELATION = 7,
  EIV_ERR_ZERO_COVARIANCE = 8,
  EIV_ERR_ESTIMATOR_UNDEFINED = 9,
  EIV_ERR_PARSE = 10,
  EIV_ERR_IO = 11,
  EIV_ERR_INTERNAL = 12
} eiv_status;

EIV_API const char* eiv_status_name(eiv_status status);
EIV_API const char* eiv_last_error(void);
/* 1-based line of the last EIV_ERR_PARSE on this thread, 0 otherwise. */
EIV_API size_t eiv_last_error_line(void);
EIV_API const char* eiv_version(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct eiv_dataset eiv_dataset;

EIV_API eiv_status eiv_dataset_create(const double* y1, const double* y2, size_t n,
                                      eiv_dataset** out);
/* Two numeric columns, comma or whitespace separated, optional header. */
EIV_API eiv_status eiv_dataset_read(const char* path, eiv_dataset** out);
EIV_API eiv_status eiv_dataset_parse(const char* text, eiv_dataset** out);
EIV_API size_t eiv_dataset_size(const eiv_dataset* data);
/* Copies the columns into caller buffers of at least eiv_dataset_size(). */
EIV_API eiv_status eiv_dataset_copy(const eiv_dataset* data, double* y1, double* y2);
EIV_API void eiv_dataset_free(eiv_dataset* data);

typedef struct eiv_stats {
  size_t n;
  double nu;
  double mean1;
  double mean2;
  double s11;
  double s22;
  double s12;
  double r;
  double l;
} eiv_stats;

EIV_API eiv_status eiv_sufficient_stats(const eiv_dataset* data, eiv_stats* out);

/* ---- posterior --------------------------------------------------------- */

typedef struct eiv_model eiv_model;

typedef struct eiv_quad_settings {
  double rel_tol;
  double abs_tol;
  size_t max_subdivisions;
  size_t grid_points; /* odd, >= 5 */
} eiv_quad_settings;

EIV_API void eiv_quad_settings_default(eiv_quad_settings* out);

/* quad may be NULL for defaults. */
EIV_API eiv_status eiv_model_build(double nu, double r, double l,
                                   const eiv_quad_settings* quad, eiv_model** out);
EIV_API eiv_status eiv_model_from_stats(const eiv_stats* stats,
                                        const eiv_quad_settings* quad, eiv_model** out);
EIV_API void eiv_model_free(eiv_model* model);

EIV_API eiv_status eiv_model_params(const eiv_model* model, double* nu, double* r,
                                    double* l, double* norm_const);
EIV_API eiv_status eiv_density(const eiv_model* model, double beta, double* out);
EIV_API eiv_status eiv_cdf(const eiv_model* model, double beta, double* out);
EIV_API eiv_status eiv_quantile(const eiv_model* model, double p, double* out);
EIV_API eiv_status eiv_median(const eiv_model* model, double* out);

typedef struct eiv_interval {
  double lower;
  double upper;
  double level;
  double median;
  int unimodal;
} eiv_interval;

EIV_API eiv_status eiv_shortest_interval(const eiv_model* model, double level,
                                         eiv_interval* out);

typedef struct eiv_grid_row {
  double beta;
  double theta;
  double density;
  double cdf;
} eiv_grid_row;

/* Uniform theta grid over [-pi/2, pi/2] (end rows have beta = -inf, +inf);
 * rows must hold `points` entries. */
EIV_API eiv_status eiv_density_grid(const eiv_model* model, size_t points,
                                    eiv_grid_row* rows);
/* Uniform beta grid over [beta_lo, beta_hi]. */
EIV_API eiv_status eiv_density_grid_beta(const eiv_model* model, double beta_lo,
                                         double beta_hi, size_t points, eiv_grid_row* rows);

/* Exact density of beta/l for n = 4 or n = 6. */
EIV_API eiv_status eiv_closed_form_density(double beta_tilde, double r, int n, double* out);

/* ---- estimators -------------------------------------------------------- */

typedef enum eiv_estimator {
  EIV_EST_OLS_Y2_ON_Y1 = 0,
  EIV_EST_OLS_Y1_ON_Y2 = 1,
  EIV_EST_GEOMETRIC_MEAN = 2,
  EIV_EST_OLS_BISECTOR = 3,
  EIV_EST_ORTHOGONAL = 4
} eiv_estimator;

EIV_API const char* eiv_estimator_name(eiv_estimator estimator);

/* When S12 = 0 only b1 is filled, the rest are NaN, `defined` is 0 and the
 * call returns EIV_ERR_ZERO_COVARIANCE. */
typedef struct eiv_slope_estimates {
  double b1;
  double b2;
  double geometric_mean;
  double ols_bisector;
  double orthogonal;
  int defined;
} eiv_slope_estimates;

EIV_API eiv_status eiv_estimate_slopes(const eiv_stats* stats, eiv_slope_estimates* out);

typedef struct eiv_limit_variants {
  double olsb_0;
  double olsb_inf;
  double or_0;
  double or_inf;
} eiv_limit_variants;

EIV_API eiv_status eiv_compute_limit_variants(double b1, double b2, eiv_limit_variants* out);

typedef struct eiv_ols_intervals {
  double b1;
  double b1_lower;
  double b1_upper;
  double b2;       /* NaN when S12 = 0 */
  double b2_lower; /* NaN when unbounded */
  double b2_upper;
  double level;
} eiv_ols_intervals;

EIV_API eiv_status eiv_compute_ols_intervals(const eiv_stats* stats, double level,
                                     eiv_ols_intervals* out);

typedef struct eiv_bootstrap_ci {
  eiv_estimator estimator;
  double estimate;
  double lower;
  double upper;
  double level;
  size_t replicates;
  size_t redrawn;
  uint64_t seed;
} eiv_bootstrap_ci;

EIV_API eiv_status eiv_bootstrap_interval(const eiv_dataset* data, eiv_estimator estimator,
                                    double level, size_t replicates, uint64_t seed,
                                    eiv_bootstrap_ci* out);
/* All estimators share the same resamples; out holds `count` entries. */
EIV_API eiv_status eiv_bootstrap_cis(const eiv_dataset* data, const eiv_estimator* estimators,
                                     size_t count, double level, size_t replicates,
                                     uint64_t seed, eiv_bootstrap_ci* out);

typedef struct eiv_agreement {
  size_t n;
  double mean_diff;
  double sd_diff;
  double loa_lower;
  double loa_upper;
  double cov_diff_mean;
} eiv_agreement;

EIV_API eiv_status eiv_agreement_stats(const eiv_dataset* data, eiv_agreement* out);
/* Per-point means (y1+y2)/2 and differences y2-y1; buffers of dataset size. */
EIV_API eiv_status eiv_agreement_points(const eiv_dataset* data, double* means, double* diffs);

/* ---- simulation -------------------------------------------------------- */

typedef struct eiv_model_config {
  size_t n;
  double beta;
  double alpha;
  double mu1;
  double tau;
  double sigma1;
  double sigma2;
  uint64_t seed;
} eiv_model_config;

EIV_API eiv_status eiv_generate_dataset(const eiv_model_config* config, eiv_dataset** out);

typedef struct eiv_setting {
  size_t n;
  double sigma1;
  double sigma2;
} eiv_setting;

typedef struct eiv_coverage_options {
  size_t datasets;
  size_t boot_reps;
  double level;
  uint64_t seed;
  unsigned threads; /* 0: hardware concurrency */
} eiv_coverage_options;

typedef struct eiv_coverage_row {
  size_t n;
  double sigma1;
  double sigma2;
  double posterior;
  double geometric_mean;
  double ols_bisector;
  double orthogonal;
  size_t used;
  size_t excluded;
} eiv_coverage_row;

typedef struct eiv_coverage_report eiv_coverage_report;

EIV_API void eiv_coverage_options_default(eiv_coverage_options* out);
/* Number of settings written by eiv_table1_settings / eiv_desk_settings
 * when `out` is NULL; otherwise fills `out` (capacity `cap`). */
EIV_API size_t eiv_table1_settings(eiv_setting* out, size_t cap);
EIV_API size_t eiv_desk_settings(eiv_setting* out, size_t cap);

EIV_API eiv_status eiv_coverage_experiment(const eiv_setting* settings, size_t count,
                                           const eiv_coverage_options* options,
                                           eiv_coverage_report** out);
EIV_API size_t eiv_coverage_report_rows(const eiv_coverage_report* report);
EIV_API eiv_status eiv_coverage_report_row(const eiv_coverage_report* report, size_t index,
                                           eiv_coverage_row* out);

typedef enum eiv_format { EIV_FORMAT_CSV = 0, EIV_FORMAT_JSON = 1 } eiv_format;

/* Serialized report; release with eiv_string_free. */
EIV_API eiv_status eiv_coverage_report_serialize(const eiv_coverage_report* report,
                                                 eiv_format format, char** out);
EIV_API void eiv_coverage_report_free(eiv_coverage_report* report);
EIV_API void eiv_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EIV_EIV_H */
