/* C interface to the giwvol library. All handles are opaque; every function
 * returning giwvol_status leaves a message for giwvol_last_error() on failure.
 * Matrices are passed row-major. */
#ifndef GIWVOL_GIWVOL_H
#define GIWVOL_GIWVOL_H

#include <stddef.h>
#include <stdint.h>

#if defined(GIWVOL_BUILDING_LIBRARY)
#define GIWVOL_API __attribute__((visibility("default")))
#else
#define GIWVOL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum giwvol_status {
  GIWVOL_OK = 0,
  GIWVOL_ERR_INTERNAL = 1,
  GIWVOL_ERR_VALIDATION = 2, /* bad config, input file, dimensions, arguments */
  GIWVOL_ERR_NUMERICAL = 3   /* factorization / domain failure; see giwvol_last_error_step */
} giwvol_status;

typedef enum giwvol_error_kind {
  GIWVOL_KIND_NONE = 0,
  GIWVOL_KIND_NOT_POSITIVE_DEFINITE,
  GIWVOL_KIND_DOMAIN,
  GIWVOL_KIND_DIMENSION_MISMATCH,
  GIWVOL_KIND_RANK_MISMATCH,
  GIWVOL_KIND_PARSE,
  GIWVOL_KIND_NON_POSITIVE_PRICE,
  GIWVOL_KIND_EMPTY_INPUT,
  GIWVOL_KIND_VALIDATION,
  GIWVOL_KIND_NUMERICAL,
  GIWVOL_KIND_IO,
  GIWVOL_KIND_INTERNAL
} giwvol_error_kind;

typedef struct giwvol_config giwvol_config;
typedef struct giwvol_series giwvol_series;
typedef struct giwvol_filter_result giwvol_filter_result;
typedef struct giwvol_search_result giwvol_search_result;

GIWVOL_API const char* giwvol_version(void);

/* Error state of the calling thread, set by the last failing call. */
GIWVOL_API const char* giwvol_last_error(void);
GIWVOL_API giwvol_error_kind giwvol_last_error_kind(void);
/* Time index of the failing step, or -1 when the failure has none. */
GIWVOL_API long giwvol_last_error_step(void);

/* ---- model configuration ---- */

/* Diagonal Omega with default priors m0 = 0, p0 = 1000, S0 = I. */
GIWVOL_API giwvol_status giwvol_config_create(size_t p, double delta, double phi,
                                              const double* omega_diag, giwvol_config** out);
GIWVOL_API giwvol_status giwvol_config_load(const char* json_path, giwvol_config** out);
GIWVOL_API giwvol_status giwvol_config_set_omega(giwvol_config* cfg, const double* omega);
GIWVOL_API giwvol_status giwvol_config_set_m0(giwvol_config* cfg, const double* m0);
GIWVOL_API giwvol_status giwvol_config_set_p0(giwvol_config* cfg, double p0);
GIWVOL_API giwvol_status giwvol_config_set_s0(giwvol_config* cfg, const double* s0);
/* phi_scaled_mean: forecast location phi * m_{t-1} instead of m_{t-1}.
 * posterior_standardization: whiten e_t with S_t instead of S_{t-1}. */
GIWVOL_API giwvol_status giwvol_config_set_modes(giwvol_config* cfg, int phi_scaled_mean,
                                                 int posterior_standardization);
GIWVOL_API size_t giwvol_config_dim(const giwvol_config* cfg);
GIWVOL_API uint64_t giwvol_config_seed(const giwvol_config* cfg);
GIWVOL_API void giwvol_config_free(giwvol_config* cfg);

/* ---- observation series (N x p) ---- */

GIWVOL_API giwvol_status giwvol_series_create(size_t n, size_t p, const double* values,
                                              giwvol_series** out);
/* levels != 0 log-differences prices; scale multiplies the resulting returns. */
GIWVOL_API giwvol_status giwvol_series_load_csv(const char* path, int levels, double scale,
                                                giwvol_series** out);
GIWVOL_API size_t giwvol_series_rows(const giwvol_series* s);
GIWVOL_API size_t giwvol_series_cols(const giwvol_series* s);
/* Copies rows * cols values into out (row-major). */
GIWVOL_API giwvol_status giwvol_series_values(const giwvol_series* s, double* out);
GIWVOL_API void giwvol_series_free(giwvol_series* s);

/* Simulated returns of length n from seed, starting at Sigma_0 = S0, theta_0 = m0. */
GIWVOL_API giwvol_status giwvol_simulate(const giwvol_config* cfg, uint64_t seed, size_t n,
                                         giwvol_series** out);

/* ---- filtering ---- */

GIWVOL_API giwvol_status giwvol_filter_run(const giwvol_config* cfg, const giwvol_series* ys,
                                           int with_likelihood, giwvol_filter_result** out);
GIWVOL_API size_t giwvol_filter_steps(const giwvol_filter_result* r);
/* t runs from 1 to giwvol_filter_steps(r). Outputs hold p or p*p values. */
GIWVOL_API giwvol_status giwvol_filter_volatility(const giwvol_filter_result* r, size_t t,
                                                  double* out);
GIWVOL_API giwvol_status giwvol_filter_forecast_mean(const giwvol_filter_result* r, size_t t,
                                                     double* out);
GIWVOL_API giwvol_status giwvol_filter_error(const giwvol_filter_result* r, size_t t,
                                             double* out);
GIWVOL_API giwvol_status giwvol_filter_standardized_error(const giwvol_filter_result* r,
                                                          size_t t, double* out);
/* Fails with the stored likelihood error when the likelihood is undefined
 * on the path or was not requested. */
GIWVOL_API giwvol_status giwvol_filter_loglik(const giwvol_filter_result* r, double* out);
/* Each output holds p values; any pointer may be NULL. */
GIWVOL_API giwvol_status giwvol_filter_metrics(const giwvol_filter_result* r, double* mse,
                                               double* msse, double* mad, double* me);
GIWVOL_API void giwvol_filter_free(giwvol_filter_result* r);

/* ---- hyperparameter search ---- */

GIWVOL_API giwvol_status giwvol_search_run(const giwvol_config* base, const giwvol_series* ys,
                                           int q, const double* delta_candidates,
                                           size_t n_candidates, int jobs,
                                           giwvol_search_result** out);
/* z holds p values. */
GIWVOL_API giwvol_status giwvol_search_best(const giwvol_search_result* r, double* z,
                                            double* delta, double* objective);
GIWVOL_API void giwvol_search_free(giwvol_search_result* r);

/* ---- batch commands ---- */

typedef enum giwvol_command {
  GIWVOL_CMD_FILTER = 0,
  GIWVOL_CMD_SIMULATE,
  GIWVOL_CMD_LOGLIK,
  GIWVOL_CMD_SEARCH,
  GIWVOL_CMD_METRICS
} giwvol_command;

typedef struct giwvol_command_options {
  const char* config_path;
  const char* input_path; /* may be NULL for simulate */
  const char* out_dir;    /* NULL means the current directory */
  int has_seed;
  uint64_t seed;
  int jobs;
  int levels;
  double scale;
  long steps;
  int timing;
} giwvol_command_options;

/* Fills the defaults: jobs 1, levels 1, scale 1, steps 500. */
GIWVOL_API void giwvol_command_options_init(giwvol_command_options* options);
GIWVOL_API giwvol_status giwvol_run_command(giwvol_command command,
                                           const giwvol_command_options* options);

#ifdef __cplusplus
}
#endif

#endif /* GIWVOL_GIWVOL_H */
