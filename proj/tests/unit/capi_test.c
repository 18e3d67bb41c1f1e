/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "esgs/esgs.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n",   \
              __FILE__, __LINE__, #cond, esgs_last_error());          \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static double abs_sum(const double* x, size_t n, void* user) {
  double s = 0.0;
  size_t i;
  (void)user;
  for (i = 0; i < n; ++i) s += fabs(x[i]);
  return s;
}

static void test_streams(void) {
  esgs_stream* a = NULL;
  esgs_stream* b = NULL;
  double u = 0, v = 0;
  int i;
  CHECK(esgs_stream_create(7, 1, &a) == ESGS_OK);
  CHECK(esgs_stream_create(7, 1, &b) == ESGS_OK);
  for (i = 0; i < 10; ++i) {
    CHECK(esgs_stream_gaussian(a, &u) == ESGS_OK);
    CHECK(esgs_stream_gaussian(b, &v) == ESGS_OK);
    CHECK(u == v);
  }
  CHECK(esgs_stream_uniform(a, &u) == ESGS_OK);
  CHECK(u >= 0.0 && u < 1.0);
  CHECK(esgs_stream_uniform(NULL, &u) == ESGS_ERR_INVALID_ARGUMENT);
  esgs_stream_destroy(a);
  esgs_stream_destroy(b);
}

static void test_problem(void) {
  esgs_problem* p = NULL;
  int64_t n = 0;
  double start[5], star[5], value = 0, metric = 0, fstar = 0;
  CHECK(esgs_problem_create("piecewise_linear", 5, "{\"mu\": 1}", &p) == ESGS_OK);
  CHECK(esgs_problem_dimension(p, &n) == ESGS_OK && n == 5);
  CHECK(esgs_problem_start(p, start, 5) == ESGS_OK);
  CHECK(fabs(start[0] * start[0] * 5 - 1.0) < 1e-12);
  CHECK(esgs_problem_f_star(p, &fstar) == ESGS_OK);
  CHECK(esgs_problem_x_star(p, star, 5) == ESGS_OK);
  CHECK(esgs_problem_exact_f(p, star, 5, &value) == ESGS_OK);
  CHECK(fabs(value - fstar) < 1e-9);
  CHECK(esgs_problem_error_metric(p, star, 5, &metric) == ESGS_OK);
  CHECK(fabs(metric) < 1e-9);
  CHECK(esgs_problem_exact_f(p, star, 4, &value) == ESGS_ERR_DIMENSION_MISMATCH);
  CHECK(strlen(esgs_last_error()) > 0);
  esgs_problem_destroy(p);

  p = NULL;
  CHECK(esgs_problem_create("no_such_problem", 5, NULL, &p) == ESGS_ERR_CONFIG);
  CHECK(p == NULL);
  CHECK(esgs_problem_create("quad_l1", 4, "{\"bogus\": 1}", &p) == ESGS_ERR_CONFIG);
  CHECK(esgs_problem_create("market", 2, "{\"beta\": 0.9}", &p) == ESGS_ERR_INVALID_ARGUMENT);
}

static void test_estimate_and_run(void) {
  esgs_problem* p = NULL;
  esgs_stream* s = NULL;
  esgs_trajectory* t = NULL;
  esgs_schedule_params params;
  double x[3] = {0.5, -0.25, 0.125}, g[3], avg[3], last[3], mean = 0, se = 0, gamma = 0, eta = 0;
  uint64_t calls = 0, steps = 0;
  CHECK(esgs_problem_from_callback(3, abs_sum, NULL, 1.8, &p) == ESGS_OK);
  CHECK(esgs_stream_create(1, 0, &s) == ESGS_OK);
  CHECK(esgs_estimate(p, "esgs", x, 3, 0.1, s, g, &calls) == ESGS_OK);
  CHECK(calls == 6);
  CHECK(esgs_estimate(p, "spsa", x, 3, 0.1, s, g, &calls) == ESGS_OK);
  CHECK(calls == 2);
  CHECK(esgs_estimate(p, "esgs_dd_known", x, 3, 0.1, s, g, &calls) != ESGS_OK);
  CHECK(esgs_estimate(p, "esgs", x, 3, -1.0, s, g, &calls) == ESGS_ERR_INVALID_ARGUMENT);
  CHECK(esgs_second_moment(p, "esgs", x, 3, 0.1, 2000, s, &mean, &se) == ESGS_OK);
  CHECK(mean > 0 && mean <= 4.0 / 3.14159265358979 * 1.8 * 1.8 * 3 * 1.1);

  memset(&params, 0, sizeof params);
  params.n = 4;
  CHECK(esgs_schedule_values("convex_diminishing", &params, 0, &gamma, &eta) == ESGS_OK);
  CHECK(gamma == 0.5 && eta == 0.5);
  params.theta = 0.5;
  params.mu = 1.0;
  CHECK(esgs_schedule_values("strongly_convex", &params, 1, &gamma, &eta) ==
        ESGS_ERR_INVALID_ARGUMENT);
  CHECK(esgs_schedule_values("adam", &params, 1, &gamma, &eta) == ESGS_ERR_INVALID_ARGUMENT);

  memset(&params, 0, sizeof params);
  params.n = 3;
  CHECK(esgs_run(p, "esgs", "convex_diminishing", &params, 50, s, &t) == ESGS_OK);
  CHECK(esgs_trajectory_steps(t, &steps) == ESGS_OK && steps == 50);
  CHECK(esgs_trajectory_oracle_calls(t, 50, &calls) == ESGS_OK && calls == 300);
  CHECK(esgs_trajectory_average(t, avg, 3) == ESGS_OK);
  CHECK(esgs_trajectory_iterate(t, 50, last, 3) == ESGS_OK);
  CHECK(esgs_trajectory_iterate(t, 51, last, 3) == ESGS_ERR_INVALID_ARGUMENT);
  esgs_trajectory_destroy(t);
  esgs_stream_destroy(s);
  esgs_problem_destroy(p);
}

static void test_bench(void) {
  const char* config =
      "{\"problem\": \"quad_l1\", \"n\": 2, \"iterations\": 1, \"replications\": 1}";
  esgs_bench_options options;
  char* report = NULL;
  memset(&options, 0, sizeof options);
  options.out_dir = "capi_bench_out";
  options.omit_timing = 1;
  CHECK(esgs_bench_execute("run", config, &options, &report) == ESGS_OK);
  CHECK(report != NULL && strstr(report, "wrote capi_bench_out") != NULL);
  esgs_string_free(report);
  report = NULL;
  CHECK(esgs_bench_execute("run", "{\"n\": 2,,}", &options, &report) == ESGS_ERR_CONFIG);
  CHECK(strstr(esgs_last_error(), "line 1") != NULL);
  CHECK(report == NULL);
  CHECK(esgs_bench_execute("plot", config, &options, NULL) == ESGS_ERR_INVALID_ARGUMENT);
}

int main(void) {
  CHECK(strlen(esgs_version()) > 0);
  CHECK(strcmp(esgs_status_name(ESGS_ERR_RATIO_BOUND), "ratio_bound") == 0);
  test_streams();
  test_problem();
  test_estimate_and_run();
  test_bench();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi_test: all checks passed\n");
  return 0;
}
