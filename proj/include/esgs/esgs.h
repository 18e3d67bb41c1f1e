/* C interface to the esgs zeroth-order optimization library.
 *
 * All functions return an esgs_status; on failure esgs_last_error() holds a
 * message for the calling thread. Handles are opaque and owned by the caller,
 * who releases them with the matching *_destroy function. Vectors are passed
 * as (pointer, length) pairs and lengths are checked against the problem. */
#ifndef ESGS_ESGS_H
#define ESGS_ESGS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ESGS_API __declspec(dllexport)
#else
#define ESGS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum esgs_status {
  ESGS_OK = 0,
  ESGS_ERR_INVALID_ARGUMENT = 1,
  ESGS_ERR_DIMENSION_MISMATCH = 2,
  ESGS_ERR_RATIO_BOUND = 3,
  ESGS_ERR_QUADRATURE = 4,
  ESGS_ERR_CONFIG = 5,
  ESGS_ERR_IO = 6,
  ESGS_ERR_ORACLE = 7,
  ESGS_ERR_INTERNAL = 99
} esgs_status;

typedef struct esgs_stream esgs_stream;
typedef struct esgs_problem esgs_problem;
typedef struct esgs_trajectory esgs_trajectory;

/* Message of the last failed call on this thread; "" if none. */
ESGS_API const char* esgs_last_error(void);
ESGS_API const char* esgs_version(void);
ESGS_API const char* esgs_status_name(esgs_status status);

/* Random streams: (seed, substream) identifies a reproducible sequence. */
ESGS_API esgs_status esgs_stream_create(uint64_t seed, uint64_t substream, esgs_stream** out);
ESGS_API void esgs_stream_destroy(esgs_stream* stream);
ESGS_API esgs_status esgs_stream_uniform(esgs_stream* stream, double* out);
ESGS_API esgs_status esgs_stream_gaussian(esgs_stream* stream, double* out);

/* Built-in problems: "quad_l1", "quadratic", "piecewise_linear", "nonconvex",
 * "market", "linear". params_json is NULL or a JSON object with the problem
 * keys of the benchmark config (instance_seed, mu, a, a1, ...). */
ESGS_API esgs_status esgs_problem_create(const char* id, int64_t n, const char* params_json,
                                         esgs_problem** out);

/* Deterministic user objective F(x) with declared Lipschitz constant. The
 * callback must be safe to call concurrently when runs are parallel. */
typedef double (*esgs_value_fn)(const double* x, size_t n, void* user);
ESGS_API esgs_status esgs_problem_from_callback(int64_t n, esgs_value_fn fn, void* user,
                                                double lipschitz, esgs_problem** out);
ESGS_API void esgs_problem_destroy(esgs_problem* problem);

ESGS_API esgs_status esgs_problem_dimension(const esgs_problem* problem, int64_t* out);
ESGS_API esgs_status esgs_problem_lipschitz(const esgs_problem* problem, double* out);
ESGS_API esgs_status esgs_problem_f_star(const esgs_problem* problem, double* out);
ESGS_API esgs_status esgs_problem_exact_f(const esgs_problem* problem, const double* x, size_t n,
                                          double* out);
ESGS_API esgs_status esgs_problem_start(const esgs_problem* problem, double* out, size_t n);
/* x_star, or ESGS_ERR_INVALID_ARGUMENT if the problem has none. */
ESGS_API esgs_status esgs_problem_x_star(const esgs_problem* problem, double* out, size_t n);
ESGS_API esgs_status esgs_problem_error_metric(const esgs_problem* problem, const double* x,
                                               size_t n, double* out);
ESGS_API esgs_status esgs_problem_project(const esgs_problem* problem, const double* x, size_t n,
                                          double* out);

/* Estimators: "esgs", "gs", "spherical", "spsa", "esgs_dd_known",
 * "esgs_dd_unknown". */
ESGS_API esgs_status esgs_estimate(const esgs_problem* problem, const char* estimator,
                                   const double* x, size_t n, double eta, esgs_stream* stream,
                                   double* gradient_out, uint64_t* oracle_calls);
ESGS_API esgs_status esgs_second_moment(const esgs_problem* problem, const char* estimator,
                                        const double* x, size_t n, double eta, uint64_t samples,
                                        esgs_stream* stream, double* mean,
                                        double* standard_error);

/* Schedule parameters; fields a kind does not use are ignored. A zero L0 or
 * mu means "use the problem's value" in esgs_run. */
typedef struct esgs_schedule_params {
  int64_t n;
  uint64_t horizon;
  double radius;
  double lipschitz;
  double theta;
  double mu;
  double eta;
  double alpha;
  double beta;
} esgs_schedule_params;

/* kind: "convex_diminishing", "convex_constant", "strongly_convex",
 * "nonconvex_fixed_eta", "nonconvex_asymptotic". */
ESGS_API esgs_status esgs_schedule_values(const char* kind, const esgs_schedule_params* params,
                                          uint64_t k, double* gamma, double* eta);

ESGS_API esgs_status esgs_run(const esgs_problem* problem, const char* estimator,
                              const char* schedule_kind, const esgs_schedule_params* params,
                              uint64_t iterations, esgs_stream* stream, esgs_trajectory** out);
ESGS_API void esgs_trajectory_destroy(esgs_trajectory* traj);
ESGS_API esgs_status esgs_trajectory_steps(const esgs_trajectory* traj, uint64_t* out);
/* Iterate x_k for 0 <= k <= steps. */
ESGS_API esgs_status esgs_trajectory_iterate(const esgs_trajectory* traj, uint64_t k,
                                             double* out, size_t n);
ESGS_API esgs_status esgs_trajectory_average(const esgs_trajectory* traj, double* out, size_t n);
ESGS_API esgs_status esgs_trajectory_oracle_calls(const esgs_trajectory* traj, uint64_t k,
                                                  uint64_t* out);
ESGS_API esgs_status esgs_trajectory_wall_time_ms(const esgs_trajectory* traj, double* out);

/* Benchmark harness. command is "moments", "run", "compare" or "dd";
 * config_json is the config document text. */
typedef struct esgs_bench_options {
  int has_seed;        /* nonzero: seed overrides the config's seed */
  uint64_t seed;
  const char* out_dir; /* NULL: $ESGS_OUT_DIR, then the config, then "." */
  unsigned jobs;       /* 0 is treated as 1 */
  int omit_timing;     /* nonzero: write wall times as 0 */
} esgs_bench_options;

/* On success *report (if non-NULL) receives a printable summary to be freed
 * with esgs_string_free. */
ESGS_API esgs_status esgs_bench_execute(const char* command, const char* config_json,
                                        const esgs_bench_options* options, char** report);
ESGS_API void esgs_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* ESGS_ESGS_H */
