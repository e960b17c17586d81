/*
 * etpsim: four-photon polarization correlation simulator, C interface.
 *
 * Conventions
 *   - Every fallible call returns an etpsim_status; ETPSIM_OK is 0.
 *   - On failure, etpsim_last_error() returns a message for the calling
 *     thread. It stays valid until the next failing call on that thread.
 *   - Objects are opaque handles created by *_create / producer calls and
 *     released by the matching *_destroy, which accepts NULL.
 *   - Angles passed to probability functions are radians; angles stored in
 *     plans and datasets are degrees.
 *   - Variable-length outputs use (buffer, capacity, *needed): pass a NULL
 *     buffer to query the size; ETPSIM_ERR_BUFFER is returned when the
 *     capacity is too small, with *needed set.
 */
#ifndef ETPSIM_ETPSIM_H
#define ETPSIM_ETPSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ETPSIM_BUILDING_LIBRARY)
#define ETPSIM_API __declspec(dllexport)
#else
#define ETPSIM_API __declspec(dllimport)
#endif
#else
#define ETPSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum etpsim_status {
  ETPSIM_OK = 0,
  ETPSIM_ERR_INPUT = 1,      /* invalid argument or NULL pointer */
  ETPSIM_ERR_PARSE = 2,      /* malformed input file */
  ETPSIM_ERR_IO = 3,         /* file cannot be opened, read or written */
  ETPSIM_ERR_INFEASIBLE = 4, /* no (alpha, beta) reproduces the ratio */
  ETPSIM_ERR_FIT = 5,        /* fit ran out of iterations */
  ETPSIM_ERR_DEGENERATE = 6, /* rank-deficient fit design */
  ETPSIM_ERR_BUFFER = 7,     /* output buffer too small */
  ETPSIM_ERR_INTERNAL = 8
} etpsim_status;

ETPSIM_API const char* etpsim_version(void);
ETPSIM_API const char* etpsim_status_string(etpsim_status status);
ETPSIM_API const char* etpsim_last_error(void);

/* ---- enumerations ------------------------------------------------------ */

typedef enum etpsim_scan {
  ETPSIM_SCAN_FIG2A = 0, /* A in H/V, rotating QWP in B */
  ETPSIM_SCAN_FIG2B = 1, /* A in R/L, QWP at 45 deg then rotating HWP in B */
  ETPSIM_SCAN_FIG2C = 2  /* A in P/M, rotating HWP in B */
} etpsim_scan;

typedef enum etpsim_source {
  ETPSIM_SOURCE_ETP = 0,
  ETPSIM_SOURCE_DOUBLE_EOP = 1,
  ETPSIM_SOURCE_SEPARABLE = 2 /* |HH>_A |VV>_B; Bell functions only */
} etpsim_source;

ETPSIM_API etpsim_status etpsim_scan_parse(const char* name, etpsim_scan* out);
ETPSIM_API const char* etpsim_scan_name(etpsim_scan scan);

/* ---- source mixture ---------------------------------------------------- */

typedef struct etpsim_mixture etpsim_mixture;

/* alpha + beta + gamma must equal 1 within 1e-9; each in [0, 1]; c0 >= 0. */
ETPSIM_API etpsim_status etpsim_mixture_create(double c0, double alpha, double beta,
                                               double gamma, etpsim_mixture** out);
ETPSIM_API void etpsim_mixture_destroy(etpsim_mixture* m);
ETPSIM_API etpsim_status etpsim_mixture_get(const etpsim_mixture* m, double* c0,
                                            double* alpha, double* beta, double* gamma);

/* Expected four-fold rate c0 [alpha/3 f + beta/2 (f + 1)/2 + gamma/4]. */
ETPSIM_API etpsim_status etpsim_fringe_rate(const etpsim_mixture* m, etpsim_scan scan,
                                            double angle_rad, double* out);
ETPSIM_API etpsim_status etpsim_fringe_shape(etpsim_scan scan, double angle_rad, double* out);
/* Fringe minimum over maximum of the closed-form model. */
ETPSIM_API etpsim_status etpsim_ratio_r_analytic(const etpsim_mixture* m, double* out);

/* ---- measurement ------------------------------------------------------- */

typedef struct etpsim_analyzer {
  int qwp_present;
  double qwp_angle_rad;
  int hwp_present;
  double hwp_angle_rad;
} etpsim_analyzer;

typedef enum etpsim_basis {
  ETPSIM_BASIS_HV = 0,
  ETPSIM_BASIS_RL = 1,
  ETPSIM_BASIS_PM = 2
} etpsim_basis;

ETPSIM_API etpsim_status etpsim_analyzer_named(etpsim_basis basis, etpsim_analyzer* out);
ETPSIM_API etpsim_status etpsim_scan_settings(etpsim_scan scan, double angle_rad,
                                              etpsim_analyzer* a, etpsim_analyzer* b);
/* Probability that all four detectors fire (ETP or DOUBLE_EOP source). */
ETPSIM_API etpsim_status etpsim_fourfold_probability(etpsim_source source,
                                                     const etpsim_analyzer* a,
                                                     const etpsim_analyzer* b, double* out);

/* Single pair (singlet with white-noise fraction `noise`), A in H/V, HWP in
 * B. pair: 0 = (A+, B+), 1 = (A+, B-), 2 = (A-, B+), 3 = (A-, B-). */
ETPSIM_API etpsim_status etpsim_twofold_fringe(double noise, double hwp_angle_rad, int pair,
                                               double* out);

typedef struct etpsim_visibility_result {
  double visibility;
  double sigma;
  int degenerate; /* all counts equal; visibility reported as 0 */
} etpsim_visibility_result;

/* Sinusoid fit over one period; `frequency` is the angular frequency in the
 * plate angle (4 for a half-wave plate). Angles in radians. */
ETPSIM_API etpsim_status etpsim_visibility(const double* angles_rad, const double* counts,
                                           size_t n, double frequency,
                                           etpsim_visibility_result* out);

/* ---- Monte Carlo ------------------------------------------------------- */

typedef struct etpsim_plan etpsim_plan;
typedef struct etpsim_dataset etpsim_dataset;

ETPSIM_API etpsim_status etpsim_grid_deg(double start_deg, double stop_deg, double step_deg,
                                         double* buffer, size_t capacity, size_t* needed);
ETPSIM_API etpsim_status etpsim_plan_create(etpsim_scan scan, const double* angles_deg,
                                            size_t n_angles, double window_s,
                                            double rate_scale, int repetitions, uint64_t seed,
                                            etpsim_plan** out);
ETPSIM_API void etpsim_plan_destroy(etpsim_plan* plan);

/* Deterministic for a given plan; each (repetition, grid index) draws from
 * its own stream. */
ETPSIM_API etpsim_status etpsim_run_scan(const etpsim_mixture* m, const etpsim_plan* plan,
                                         etpsim_dataset** out);
ETPSIM_API etpsim_status etpsim_expected_counts(const etpsim_mixture* m,
                                                const etpsim_plan* plan, double angle_deg,
                                                double* out);

typedef struct etpsim_record {
  int repetition;
  int grid_index;
  double angle_deg;
  uint64_t counts;
  double sigma;
} etpsim_record;

ETPSIM_API void etpsim_dataset_destroy(etpsim_dataset* d);
ETPSIM_API etpsim_status etpsim_dataset_size(const etpsim_dataset* d, size_t* out);
ETPSIM_API etpsim_status etpsim_dataset_record(const etpsim_dataset* d, size_t index,
                                               etpsim_record* out);
ETPSIM_API etpsim_status etpsim_dataset_scan(const etpsim_dataset* d, etpsim_scan* out);
ETPSIM_API etpsim_status etpsim_dataset_repetitions(const etpsim_dataset* d, int* out);

/* CSV columns: repetition,angle_deg,counts,sigma. The scan is not stored in
 * the file and must be given when reading. */
ETPSIM_API etpsim_status etpsim_dataset_write_csv(const etpsim_dataset* d, const char* path);
ETPSIM_API etpsim_status etpsim_dataset_write_json(const etpsim_dataset* d, const char* path);
ETPSIM_API etpsim_status etpsim_dataset_read_csv(const char* path, etpsim_scan scan,
                                                 etpsim_dataset** out);
/* Model curve (angle_deg,expected_counts) on the dataset's grid. */
ETPSIM_API etpsim_status etpsim_model_write_csv(const etpsim_mixture* m,
                                                const etpsim_dataset* d, const char* path);
ETPSIM_API etpsim_status etpsim_model_write_json(const etpsim_mixture* m,
                                                 const etpsim_dataset* d, const char* path);

/* ---- estimation -------------------------------------------------------- */

typedef struct etpsim_summary {
  double c_parallel;
  double c_perpendicular;
  double sigma_parallel;
  double sigma_perpendicular;
} etpsim_summary;

typedef struct etpsim_ratio {
  double r;
  double sigma_r;
  int n_experiments;
} etpsim_ratio;

typedef struct etpsim_fractions {
  double alpha;
  double beta;
  double gamma;
  double sigma_alpha;
} etpsim_fractions;

/* One summary per repetition from the grid points on the fringe extrema. */
ETPSIM_API etpsim_status etpsim_summaries_from_extrema(const etpsim_dataset* d,
                                                       etpsim_summary* buffer,
                                                       size_t capacity, size_t* needed);
ETPSIM_API etpsim_status etpsim_estimate_r(const etpsim_summary* summaries, size_t n,
                                           etpsim_ratio* out);
/* etp_indicated: r < 1/2. conservative: r + 2 sigma_r < 1/2. */
ETPSIM_API etpsim_status etpsim_criterion(const etpsim_ratio* r, int* etp_indicated,
                                          int* conservative);
/* r > 1/2 clamps alpha to 0 and sets *out_of_model. */
ETPSIM_API etpsim_status etpsim_alpha_from_r(double r, double* alpha, int* out_of_model);
ETPSIM_API etpsim_status etpsim_alpha_sigma_from_r(double r, double sigma_r, double* out);
ETPSIM_API etpsim_status etpsim_feasible_r_range(double gamma, double* r_min, double* r_max);
/* ETPSIM_ERR_INFEASIBLE when r is outside etpsim_feasible_r_range(gamma). */
ETPSIM_API etpsim_status etpsim_alpha_beta_with_noise(double r, double gamma, double sigma_r,
                                                      etpsim_fractions* out);

/* ---- fitting ----------------------------------------------------------- */

typedef enum etpsim_fit_model {
  ETPSIM_FIT_MIXTURE_FREE_GAMMA = 0,
  ETPSIM_FIT_MIXTURE_GAMMA_FIXED = 1,
  ETPSIM_FIT_SINUSOID = 2
} etpsim_fit_model;

typedef struct etpsim_fit_spec {
  etpsim_fit_model model;
  double gamma_fixed;
  double frequency;
  int max_iterations;
} etpsim_fit_spec;

typedef struct etpsim_fit_summary {
  double chi2;
  int dof;
  double reduced_chi2;
  int iterations;
  double r;
  double sigma_r;
} etpsim_fit_summary;

typedef struct etpsim_fit etpsim_fit;

ETPSIM_API void etpsim_fit_spec_default(etpsim_fit_spec* out);
ETPSIM_API etpsim_status etpsim_fit_model_parse(const char* name, etpsim_fit_model* out);
ETPSIM_API const char* etpsim_fit_model_name(etpsim_fit_model model);
ETPSIM_API etpsim_status etpsim_fit_dataset(const etpsim_dataset* d,
                                            const etpsim_fit_spec* spec, etpsim_fit** out);
ETPSIM_API void etpsim_fit_destroy(etpsim_fit* fit);
ETPSIM_API etpsim_status etpsim_fit_get_summary(const etpsim_fit* fit,
                                                etpsim_fit_summary* out);
ETPSIM_API etpsim_status etpsim_fit_param_count(const etpsim_fit* fit, size_t* out);
/* Name pointer is owned by the fit handle. */
ETPSIM_API etpsim_status etpsim_fit_param(const etpsim_fit* fit, size_t index,
                                          const char** name, double* value,
                                          double* std_error);
ETPSIM_API etpsim_status etpsim_fit_covariance(const etpsim_fit* fit, size_t i, size_t j,
                                               double* out);
ETPSIM_API etpsim_status etpsim_fit_evaluate(const etpsim_fit* fit, etpsim_scan scan,
                                             double angle_rad, double* out);

/* ---- Bell / CHSH ------------------------------------------------------- */

typedef enum etpsim_bell_family {
  ETPSIM_BELL_UNRESTRICTED = 0, /* V D V^dagger, V any local unitary */
  ETPSIM_BELL_ANALYZER = 1      /* one wave-plate unitary per path, H-port counting */
} etpsim_bell_family;

typedef enum etpsim_bell_strategy {
  ETPSIM_BELL_COARSE_GRID_THEN_LOCAL = 0,
  ETPSIM_BELL_MULTISTART_LOCAL = 1
} etpsim_bell_strategy;

typedef struct etpsim_bell_options {
  etpsim_bell_family family;
  etpsim_bell_strategy strategy;
  int restarts;
  int coarse_samples;
  int max_evaluations;
  uint64_t seed;
  int parallel;
} etpsim_bell_options;

typedef struct etpsim_bell_summary {
  double best_value;
  int best_restart;
  double spread;
  long long evaluations;
  int beats_classical;
  int restarts;
} etpsim_bell_summary;

typedef struct etpsim_bell_report etpsim_bell_report;

ETPSIM_API void etpsim_bell_options_default(etpsim_bell_options* out);
ETPSIM_API etpsim_status etpsim_bell_family_parse(const char* name, etpsim_bell_family* out);
ETPSIM_API etpsim_status etpsim_bell_strategy_parse(const char* name,
                                                    etpsim_bell_strategy* out);
ETPSIM_API const char* etpsim_bell_family_name(etpsim_bell_family family);
ETPSIM_API const char* etpsim_bell_strategy_name(etpsim_bell_strategy strategy);

ETPSIM_API etpsim_status etpsim_bell_optimize(etpsim_source source,
                                              const etpsim_bell_options* options,
                                              etpsim_bell_report** out);
ETPSIM_API void etpsim_bell_report_destroy(etpsim_bell_report* report);
ETPSIM_API etpsim_status etpsim_bell_report_summary(const etpsim_bell_report* report,
                                                    etpsim_bell_summary* out);
/* Local optimum of every restart, in restart order. */
ETPSIM_API etpsim_status etpsim_bell_report_optima(const etpsim_bell_report* report,
                                                   double* buffer, size_t capacity,
                                                   size_t* needed);
/* Best settings as JSON {"a": [[[re, im], ...], ...], "a_prime": ..., "b": ...,
 * "b_prime": ...}; NUL terminator included in *needed. */
ETPSIM_API etpsim_status etpsim_bell_report_settings_json(const etpsim_bell_report* report,
                                                          char* buffer, size_t capacity,
                                                          size_t* needed);
/* Best CHSH value over deterministic local strategies. */
ETPSIM_API etpsim_status etpsim_bell_classical_max(etpsim_source source, double* out);

/* ---- cross-validation -------------------------------------------------- */

typedef enum etpsim_fault {
  ETPSIM_FAULT_NONE = 0,
  ETPSIM_FAULT_PERTURBED_LIFT = 1
} etpsim_fault;

typedef struct etpsim_validation_options {
  int override_tolerance; /* nonzero: use `tolerance` for every check */
  double tolerance;
  etpsim_fault fault;
  int random_cases;
  uint64_t seed;
} etpsim_validation_options;

typedef struct etpsim_validation etpsim_validation;

ETPSIM_API void etpsim_validation_options_default(etpsim_validation_options* out);
ETPSIM_API etpsim_status etpsim_fault_parse(const char* name, etpsim_fault* out);
ETPSIM_API etpsim_status etpsim_validate(const etpsim_validation_options* options,
                                         etpsim_validation** out);
ETPSIM_API void etpsim_validation_destroy(etpsim_validation* v);
ETPSIM_API etpsim_status etpsim_validation_count(const etpsim_validation* v, size_t* out);
ETPSIM_API etpsim_status etpsim_validation_check(const etpsim_validation* v, size_t index,
                                                 const char** name, double* deviation,
                                                 double* tolerance, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* ETPSIM_ETPSIM_H */
