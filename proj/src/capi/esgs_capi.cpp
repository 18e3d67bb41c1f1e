#include "esgs/esgs.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "bench.hpp"
#include "error.hpp"
#include "estimators.hpp"
#include "json.hpp"
#include "optimizer.hpp"
#include "problems.hpp"
#include "random.hpp"

struct esgs_stream {
  esgs::RandomStream stream;
};

struct esgs_problem {
  esgs::BenchmarkProblem problem;
};

struct esgs_trajectory {
  esgs::Trajectory traj;
};

namespace {

thread_local std::string last_error;

esgs_status status_of(esgs::ErrorCode code) {
  switch (code) {
    case esgs::ErrorCode::invalid_argument: return ESGS_ERR_INVALID_ARGUMENT;
    case esgs::ErrorCode::dimension_mismatch: return ESGS_ERR_DIMENSION_MISMATCH;
    case esgs::ErrorCode::ratio_bound: return ESGS_ERR_RATIO_BOUND;
    case esgs::ErrorCode::quadrature: return ESGS_ERR_QUADRATURE;
    case esgs::ErrorCode::config: return ESGS_ERR_CONFIG;
    case esgs::ErrorCode::io: return ESGS_ERR_IO;
    case esgs::ErrorCode::oracle: return ESGS_ERR_ORACLE;
  }
  return ESGS_ERR_INTERNAL;
}

template <typename F>
esgs_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ESGS_OK;
  } catch (const esgs::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ESGS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ESGS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return ESGS_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* what) {
  esgs::require(ptr != nullptr, esgs::ErrorCode::invalid_argument,
                std::string(what) + " must not be NULL");
}

esgs::Vector read_vector(const esgs_problem* p, const double* x, size_t n) {
  need(x, "x");
  esgs::require(static_cast<Eigen::Index>(n) == p->problem.n,
                esgs::ErrorCode::dimension_mismatch,
                "vector has length " + std::to_string(n) + ", problem dimension is " +
                    std::to_string(p->problem.n));
  return Eigen::Map<const esgs::Vector>(x, static_cast<Eigen::Index>(n));
}

void write_vector(const esgs::Vector& v, double* out, size_t n) {
  need(out, "output buffer");
  esgs::require(static_cast<Eigen::Index>(n) == v.size(), esgs::ErrorCode::dimension_mismatch,
                "output buffer has length " + std::to_string(n) + ", expected " +
                    std::to_string(v.size()));
  std::memcpy(out, v.data(), sizeof(double) * n);
}

esgs::Schedule make_schedule(const char* kind, const esgs_schedule_params& sp) {
  need(kind, "schedule kind");
  switch (esgs::schedule_from_string(kind)) {
    case esgs::ScheduleKind::convex_diminishing:
      return esgs::Schedule::convex_diminishing(sp.n);
    case esgs::ScheduleKind::convex_constant:
      return esgs::Schedule::convex_constant(sp.n, sp.horizon, sp.radius, sp.lipschitz);
    case esgs::ScheduleKind::strongly_convex:
      return esgs::Schedule::strongly_convex(sp.theta, sp.mu);
    case esgs::ScheduleKind::nonconvex_fixed_eta:
      return esgs::Schedule::nonconvex_fixed_eta(sp.eta, sp.lipschitz, sp.n);
    case esgs::ScheduleKind::nonconvex_asymptotic:
      return esgs::Schedule::nonconvex_asymptotic(sp.alpha, sp.beta);
    case esgs::ScheduleKind::custom:
      break;
  }
  esgs::fail(esgs::ErrorCode::invalid_argument,
             "custom schedules are not available through the C interface");
}

}  // namespace

extern "C" {

const char* esgs_last_error(void) { return last_error.c_str(); }

const char* esgs_version(void) { return "1.0.0"; }

const char* esgs_status_name(esgs_status status) {
  switch (status) {
    case ESGS_OK: return "ok";
    case ESGS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ESGS_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case ESGS_ERR_RATIO_BOUND: return "ratio_bound";
    case ESGS_ERR_QUADRATURE: return "quadrature";
    case ESGS_ERR_CONFIG: return "config";
    case ESGS_ERR_IO: return "io";
    case ESGS_ERR_ORACLE: return "oracle";
    case ESGS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

esgs_status esgs_stream_create(uint64_t seed, uint64_t substream, esgs_stream** out) {
  return guarded([&] {
    need(out, "out");
    *out = new esgs_stream{esgs::RandomStream(seed, substream)};
  });
}

void esgs_stream_destroy(esgs_stream* stream) { delete stream; }

esgs_status esgs_stream_uniform(esgs_stream* stream, double* out) {
  return guarded([&] {
    need(stream, "stream");
    need(out, "out");
    *out = stream->stream.uniform();
  });
}

esgs_status esgs_stream_gaussian(esgs_stream* stream, double* out) {
  return guarded([&] {
    need(stream, "stream");
    need(out, "out");
    *out = stream->stream.gaussian();
  });
}

esgs_status esgs_problem_create(const char* id, int64_t n, const char* params_json,
                                esgs_problem** out) {
  return guarded([&] {
    need(id, "id");
    need(out, "out");
    nlohmann::json doc = nlohmann::json::object();
    if (params_json != nullptr && *params_json != '\0') {
      try {
        doc = nlohmann::json::parse(params_json);
      } catch (const nlohmann::json::parse_error& e) {
        esgs::fail(esgs::ErrorCode::config, std::string("problem parameters: ") + e.what());
      }
      esgs::require(doc.is_object(), esgs::ErrorCode::config,
                    "problem parameters must be a JSON object");
      esgs::require(!doc.contains("problem") && !doc.contains("n"), esgs::ErrorCode::config,
                    "problem parameters must not repeat 'problem' or 'n'");
    }
    esgs::require(n >= 1, esgs::ErrorCode::invalid_argument, "n must be >= 1");
    doc["problem"] = id;
    doc["n"] = n;
    const esgs::BenchConfig config = esgs::parse_config(doc.dump());
    auto problem = std::make_unique<esgs_problem>();
    problem->problem = esgs::build_problem(config, static_cast<Eigen::Index>(n));
    *out = problem.release();
  });
}

esgs_status esgs_problem_from_callback(int64_t n, esgs_value_fn fn, void* user, double lipschitz,
                                       esgs_problem** out) {
  return guarded([&] {
    need(out, "out");
    esgs::require(fn != nullptr, esgs::ErrorCode::invalid_argument, "callback must not be NULL");
    esgs::require(n >= 1, esgs::ErrorCode::invalid_argument, "n must be >= 1");
    const auto call = [fn, user](const esgs::Vector& x) {
      return fn(x.data(), static_cast<size_t>(x.size()), user);
    };
    auto problem = std::make_unique<esgs_problem>();
    esgs::BenchmarkProblem& p = problem->problem;
    p.id = "callback";
    p.n = static_cast<Eigen::Index>(n);
    p.oracle = std::make_shared<esgs::FunctionOracle>(
        p.n, [call](const esgs::Vector& x, const esgs::Noise&) { return call(x); }, nullptr,
        lipschitz);
    p.exact_f = call;
    p.lipschitz = lipschitz;
    p.f_star = 0.0;
    p.x0 = esgs::Vector::Zero(p.n);
    *out = problem.release();
  });
}

void esgs_problem_destroy(esgs_problem* problem) { delete problem; }

esgs_status esgs_problem_dimension(const esgs_problem* problem, int64_t* out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    *out = problem->problem.n;
  });
}

esgs_status esgs_problem_lipschitz(const esgs_problem* problem, double* out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    *out = problem->problem.lipschitz;
  });
}

esgs_status esgs_problem_f_star(const esgs_problem* problem, double* out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    *out = problem->problem.f_star;
  });
}

esgs_status esgs_problem_exact_f(const esgs_problem* problem, const double* x, size_t n,
                                 double* out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    *out = problem->problem.exact_f(read_vector(problem, x, n));
  });
}

esgs_status esgs_problem_start(const esgs_problem* problem, double* out, size_t n) {
  return guarded([&] {
    need(problem, "problem");
    write_vector(problem->problem.x0, out, n);
  });
}

esgs_status esgs_problem_x_star(const esgs_problem* problem, double* out, size_t n) {
  return guarded([&] {
    need(problem, "problem");
    esgs::require(problem->problem.x_star.has_value(), esgs::ErrorCode::invalid_argument,
                  "problem has no known minimizer");
    write_vector(*problem->problem.x_star, out, n);
  });
}

esgs_status esgs_problem_error_metric(const esgs_problem* problem, const double* x, size_t n,
                                      double* out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    esgs::require(static_cast<bool>(problem->problem.gradient) ||
                      problem->problem.curvature != esgs::Curvature::nonconvex,
                  esgs::ErrorCode::invalid_argument, "problem has no error metric");
    *out = esgs::error_metric(problem->problem, read_vector(problem, x, n));
  });
}

esgs_status esgs_problem_project(const esgs_problem* problem, const double* x, size_t n,
                                 double* out) {
  return guarded([&] {
    need(problem, "problem");
    write_vector(problem->problem.set.project(read_vector(problem, x, n)), out, n);
  });
}

esgs_status esgs_estimate(const esgs_problem* problem, const char* estimator, const double* x,
                          size_t n, double eta, esgs_stream* stream, double* gradient_out,
                          uint64_t* oracle_calls) {
  return guarded([&] {
    need(problem, "problem");
    need(estimator, "estimator");
    need(stream, "stream");
    const esgs::Vector point = read_vector(problem, x, n);
    const esgs::Estimator est =
        esgs::make_estimator(problem->problem, esgs::estimator_from_string(estimator));
    const esgs::GradientSample sample = est(point, esgs::SmoothingParams(eta), stream->stream);
    write_vector(sample.estimate, gradient_out, n);
    if (oracle_calls != nullptr) *oracle_calls = sample.oracle_calls;
  });
}

esgs_status esgs_second_moment(const esgs_problem* problem, const char* estimator,
                               const double* x, size_t n, double eta, uint64_t samples,
                               esgs_stream* stream, double* mean, double* standard_error) {
  return guarded([&] {
    need(problem, "problem");
    need(estimator, "estimator");
    need(stream, "stream");
    need(mean, "mean");
    const esgs::Vector point = read_vector(problem, x, n);
    const esgs::MomentEstimate m = esgs::second_moment_probe(
        esgs::make_estimator(problem->problem, esgs::estimator_from_string(estimator)), point,
        esgs::SmoothingParams(eta), samples, stream->stream);
    *mean = m.mean;
    if (standard_error != nullptr) *standard_error = m.standard_error;
  });
}

esgs_status esgs_schedule_values(const char* kind, const esgs_schedule_params* params, uint64_t k,
                                 double* gamma, double* eta) {
  return guarded([&] {
    need(params, "params");
    need(gamma, "gamma");
    need(eta, "eta");
    const auto [g, e] = make_schedule(kind, *params).values(k);
    *gamma = g;
    *eta = e;
  });
}

esgs_status esgs_run(const esgs_problem* problem, const char* estimator, const char* schedule_kind,
                     const esgs_schedule_params* params, uint64_t iterations,
                     esgs_stream* stream, esgs_trajectory** out) {
  return guarded([&] {
    need(problem, "problem");
    need(estimator, "estimator");
    need(params, "params");
    need(stream, "stream");
    need(out, "out");
    const esgs::BenchmarkProblem& p = problem->problem;
    esgs_schedule_params sp = *params;
    if (sp.n == 0) sp.n = p.n;
    if (sp.horizon == 0) sp.horizon = iterations;
    if (sp.lipschitz == 0.0) sp.lipschitz = p.lipschitz;
    if (sp.mu == 0.0) sp.mu = p.mu;
    const esgs::Schedule schedule = make_schedule(schedule_kind, sp);
    auto traj = std::make_unique<esgs_trajectory>();
    traj->traj = esgs::run(esgs::make_estimator(p, esgs::estimator_from_string(estimator)),
                           schedule, iterations, p.set, p.x0, stream->stream);
    *out = traj.release();
  });
}

void esgs_trajectory_destroy(esgs_trajectory* traj) { delete traj; }

esgs_status esgs_trajectory_steps(const esgs_trajectory* traj, uint64_t* out) {
  return guarded([&] {
    need(traj, "trajectory");
    need(out, "out");
    *out = traj->traj.steps();
  });
}

esgs_status esgs_trajectory_iterate(const esgs_trajectory* traj, uint64_t k, double* out,
                                    size_t n) {
  return guarded([&] {
    need(traj, "trajectory");
    esgs::require(k < traj->traj.iterates.size(), esgs::ErrorCode::invalid_argument,
                  "iterate index out of range");
    write_vector(traj->traj.iterates[k], out, n);
  });
}

esgs_status esgs_trajectory_average(const esgs_trajectory* traj, double* out, size_t n) {
  return guarded([&] {
    need(traj, "trajectory");
    write_vector(esgs::weighted_average(traj->traj), out, n);
  });
}

esgs_status esgs_trajectory_oracle_calls(const esgs_trajectory* traj, uint64_t k, uint64_t* out) {
  return guarded([&] {
    need(traj, "trajectory");
    need(out, "out");
    esgs::require(k < traj->traj.oracle_calls_cumulative.size(),
                  esgs::ErrorCode::invalid_argument, "step index out of range");
    *out = traj->traj.oracle_calls_cumulative[k];
  });
}

esgs_status esgs_trajectory_wall_time_ms(const esgs_trajectory* traj, double* out) {
  return guarded([&] {
    need(traj, "trajectory");
    need(out, "out");
    *out = traj->traj.wall_time_ms;
  });
}

esgs_status esgs_bench_execute(const char* command, const char* config_json,
                               const esgs_bench_options* options, char** report) {
  return guarded([&] {
    need(command, "command");
    need(config_json, "config");
    esgs::CommandOptions opts;
    if (options != nullptr) {
      if (options->has_seed) opts.seed = options->seed;
      if (options->out_dir != nullptr) opts.out_dir = std::string(options->out_dir);
      opts.jobs = options->jobs;
      opts.omit_timing = options->omit_timing != 0;
    }
    const std::string text = esgs::run_command(command, esgs::parse_config(config_json), opts);
    if (report != nullptr) {
      char* copy = static_cast<char*>(std::malloc(text.size() + 1));
      if (copy == nullptr) throw std::bad_alloc();
      std::memcpy(copy, text.c_str(), text.size() + 1);
      *report = copy;
    }
  });
}

void esgs_string_free(char* text) { std::free(text); }

}  // extern "C"
