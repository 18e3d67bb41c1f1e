#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "error.hpp"

namespace esgs {

namespace {

using json = nlohmann::json;

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
  fail(ErrorCode::config, "config field '" + key + "': " + what);
}

double get_double(const std::string& key, const json& value) {
  if (!value.is_number()) field_error(key, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) field_error(key, "must be finite");
  return v;
}

double get_positive(const std::string& key, const json& value) {
  const double v = get_double(key, value);
  if (!(v > 0.0)) field_error(key, "must be positive");
  return v;
}

std::uint64_t get_uint(const std::string& key, const json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    if (value.get<std::int64_t>() < 0) field_error(key, "must be >= 0");
    return value.get<std::uint64_t>();
  }
  field_error(key, "expected a nonnegative integer");
}

bool get_bool(const std::string& key, const json& value) {
  if (!value.is_boolean()) field_error(key, "expected true or false");
  return value.get<bool>();
}

std::string get_string(const std::string& key, const json& value) {
  if (!value.is_string()) field_error(key, "expected a string");
  return value.get<std::string>();
}

std::vector<std::string> get_string_list(const std::string& key, const json& value) {
  if (value.is_string()) return {value.get<std::string>()};
  if (!value.is_array()) field_error(key, "expected a string or a list of strings");
  std::vector<std::string> out;
  for (const auto& item : value) out.push_back(get_string(key, item));
  return out;
}

template <typename F>
auto with_field(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    field_error(key, e.what());
  }
}

using Setter = std::function<void(BenchConfig&, const std::string&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"description", [](BenchConfig&, const std::string& k, const json& v) { get_string(k, v); }},
      {"problem", [](BenchConfig& c, const std::string& k,
                     const json& v) { c.problem = get_string(k, v); }},
      {"n",
       [](BenchConfig& c, const std::string& k, const json& v) {
         c.dimensions.clear();
         if (v.is_array()) {
           for (const auto& item : v) c.dimensions.push_back(static_cast<Eigen::Index>(get_uint(k, item)));
         } else {
           c.dimensions.push_back(static_cast<Eigen::Index>(get_uint(k, v)));
         }
         if (c.dimensions.empty()) field_error(k, "needs at least one dimension");
         for (auto n : c.dimensions)
           if (n < 1) field_error(k, "dimensions must be >= 1");
       }},
      {"instance_seed", [](BenchConfig& c, const std::string& k,
                           const json& v) { c.instance_seed = get_uint(k, v); }},
      {"mu",
       [](BenchConfig& c, const std::string& k, const json& v) {
         c.mu = get_double(k, v);
         if (c.mu < 0.0) field_error(k, "must be >= 0");
       }},
      {"linear_L0", [](BenchConfig& c, const std::string& k,
                       const json& v) { c.linear_lipschitz = get_positive(k, v); }},
      {"a", [](BenchConfig& c, const std::string& k, const json& v) { c.market.a = get_double(k, v); }},
      {"a1", [](BenchConfig& c, const std::string& k, const json& v) { c.market.a1 = get_double(k, v); }},
      {"a2", [](BenchConfig& c, const std::string& k, const json& v) { c.market.a2 = get_double(k, v); }},
      {"beta", [](BenchConfig& c, const std::string& k,
                  const json& v) { c.market.beta = get_double(k, v); }},
      {"sigma2", [](BenchConfig& c, const std::string& k,
                    const json& v) { c.market.sigma2 = get_positive(k, v); }},
      {"l2", [](BenchConfig& c, const std::string& k, const json& v) { c.market.l2 = get_double(k, v); }},
      {"r2", [](BenchConfig& c, const std::string& k, const json& v) { c.market.r2 = get_double(k, v); }},
      {"box_upper", [](BenchConfig& c, const std::string& k,
                       const json& v) { c.market.upper = get_positive(k, v); }},
      {"log_ratio_bound", [](BenchConfig& c, const std::string& k,
                             const json& v) { c.market.log_ratio_bound = get_positive(k, v); }},
      {"c_xi", [](BenchConfig& c, const std::string& k,
                  const json& v) { c.market.c_xi = get_positive(k, v); }},
      {"estimators",
       [](BenchConfig& c, const std::string& k, const json& v) {
         c.estimators.clear();
         for (const auto& name : get_string_list(k, v))
           c.estimators.push_back(with_field(k, [&] { return estimator_from_string(name); }));
         if (c.estimators.empty()) field_error(k, "needs at least one estimator");
       }},
      {"schedule", [](BenchConfig& c, const std::string& k, const json& v) {
         const std::string name = get_string(k, v);
         c.schedule = with_field(k, [&] { return schedule_from_string(name); });
       }},
      {"theta", [](BenchConfig& c, const std::string& k,
                   const json& v) { c.theta = get_positive(k, v); }},
      {"schedule_mu", [](BenchConfig& c, const std::string& k,
                         const json& v) { c.schedule_mu = get_positive(k, v); }},
      {"radius", [](BenchConfig& c, const std::string& k,
                    const json& v) { c.radius = get_positive(k, v); }},
      {"schedule_L0", [](BenchConfig& c, const std::string& k,
                         const json& v) { c.schedule_lipschitz = get_positive(k, v); }},
      {"eta", [](BenchConfig& c, const std::string& k, const json& v) { c.eta = get_positive(k, v); }},
      {"gamma_scale", [](BenchConfig& c, const std::string& k,
                         const json& v) { c.gamma_law.scale = get_positive(k, v); }},
      {"gamma_exponent", [](BenchConfig& c, const std::string& k,
                            const json& v) { c.gamma_law.power = get_double(k, v); }},
      {"gamma_offset", [](BenchConfig& c, const std::string& k,
                          const json& v) { c.gamma_law.offset = get_double(k, v); }},
      {"eta_scale", [](BenchConfig& c, const std::string& k,
                       const json& v) { c.eta_law.scale = get_positive(k, v); }},
      {"eta_exponent", [](BenchConfig& c, const std::string& k,
                          const json& v) { c.eta_law.power = get_double(k, v); }},
      {"eta_offset", [](BenchConfig& c, const std::string& k,
                        const json& v) { c.eta_law.offset = get_double(k, v); }},
      {"scale_by_q_norm", [](BenchConfig& c, const std::string& k,
                             const json& v) { c.scale_by_q_norm = get_bool(k, v); }},
      {"iterations", [](BenchConfig& c, const std::string& k,
                        const json& v) { c.iterations = get_uint(k, v); }},
      {"replications",
       [](BenchConfig& c, const std::string& k, const json& v) {
         c.replications = get_uint(k, v);
         if (c.replications < 1) field_error(k, "must be >= 1");
       }},
      {"seed", [](BenchConfig& c, const std::string& k, const json& v) { c.seed = get_uint(k, v); }},
      {"metric", [](BenchConfig& c, const std::string& k, const json& v) {
         const std::string name = get_string(k, v);
         c.metric = with_field(k, [&] { return metric_from_string(name); });
       }},
      {"trajectories", [](BenchConfig& c, const std::string& k,
                          const json& v) { c.trajectories = get_bool(k, v); }},
      {"output_dir", [](BenchConfig& c, const std::string& k,
                        const json& v) { c.output_dir = get_string(k, v); }},
      {"moment_samples",
       [](BenchConfig& c, const std::string& k, const json& v) {
         c.moment_samples = get_uint(k, v);
         if (c.moment_samples < 1) field_error(k, "must be >= 1");
       }},
      {"moment_eta", [](BenchConfig& c, const std::string& k,
                        const json& v) { c.moment_eta = get_positive(k, v); }},
      {"moment_point",
       [](BenchConfig& c, const std::string& k, const json& v) {
         const std::string where = get_string(k, v);
         if (where != "start" && where != "origin") field_error(k, "expected 'start' or 'origin'");
         c.moment_at_origin = where == "origin";
       }},
  };
  return table;
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

// Runs task(i) for i in [0, count) on up to `jobs` threads. Each task writes
// only its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
}

std::uint64_t substream_id(std::size_t dim_index, std::size_t est_index, std::uint64_t rep) {
  return (static_cast<std::uint64_t>(dim_index) << 44) |
         (static_cast<std::uint64_t>(est_index) << 32) | rep;
}

constexpr std::uint64_t kSelectionBit = 1ull << 62;

struct RunOutcome {
  ResultRow row;
  Vector final_iterate;
  std::vector<TrajectoryRow> trajectory;
};

RunOutcome run_one(const BenchConfig& config, const BenchmarkProblem& problem, Metric metric,
                   EstimatorKind kind, std::uint64_t rep, std::uint64_t substream,
                   bool want_trajectory) {
  const std::uint64_t iterations = budget_iterations(kind, problem.n, config.iterations);
  const Schedule schedule = build_schedule(config, problem, iterations);
  const Estimator estimator = make_estimator(problem, kind);
  const bool random_pick =
      metric == Metric::random_residual || metric == Metric::random_smoothed_residual;

  RunOptions options;
  options.record_iterates = random_pick;
  RunOutcome out;
  if (want_trajectory) {
    options.observer = [&](std::uint64_t k, const Vector& x) {
      out.trajectory.push_back({k, error_metric(problem, x), 0});
    };
  }
  RandomStream stream(config.seed, substream);
  const Trajectory traj = run(estimator, schedule, iterations, problem.set, problem.x0, stream,
                              options);
  for (auto& row : out.trajectory) row.oracle_calls = traj.oracle_calls_cumulative[row.k];

  double error = 0.0;
  switch (metric) {
    case Metric::average_gap:
      error = problem.exact_f(weighted_average(traj)) - problem.f_star;
      break;
    case Metric::last_gap:
      error = problem.exact_f(traj.final_iterate) - problem.f_star;
      break;
    case Metric::last_distance:
      require(problem.x_star.has_value(), ErrorCode::config,
              "metric last_distance needs a known x*");
      error = (traj.final_iterate - *problem.x_star).norm();
      break;
    case Metric::last_residual:
      error = problem.gradient(traj.final_iterate).squaredNorm();
      break;
    case Metric::random_residual:
    case Metric::random_smoothed_residual: {
      RandomStream pick(config.seed, substream | kSelectionBit);
      const Vector x = sample_random_iterate(traj, pick);
      if (metric == Metric::random_residual) {
        error = problem.gradient(x).squaredNorm();
      } else {
        require(static_cast<bool>(problem.smoothed_gradient), ErrorCode::config,
                "problem '" + problem.id + "' has no closed-form smoothed gradient");
        const double eta = traj.etas.empty() ? schedule.values(schedule.first_index()).second
                                             : traj.etas.back();
        error = problem.smoothed_gradient(x, eta).squaredNorm();
      }
      break;
    }
    case Metric::automatic:
      fail(ErrorCode::config, "metric was not resolved");
  }

  out.row.problem = problem.id;
  out.row.n = problem.n;
  out.row.estimator = std::string(to_string(kind));
  out.row.replication = rep;
  out.row.error = error;
  out.row.wall_time_ms = traj.wall_time_ms;
  out.row.oracle_calls = traj.total_oracle_calls();
  out.row.seed = config.seed;
  out.final_iterate = traj.final_iterate;
  return out;
}

void check_budget(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, Eigen::Index>, std::uint64_t> calls;
  for (const auto& row : rows) {
    const auto key = std::make_pair(row.problem, row.n);
    const auto [it, inserted] = calls.emplace(key, row.oracle_calls);
    require(inserted || it->second == row.oracle_calls, ErrorCode::config,
            "budget mismatch in group " + row.problem + " n=" + std::to_string(row.n) + ": " +
                std::to_string(it->second) + " vs " + std::to_string(row.oracle_calls) +
                " oracle calls");
  }
}

BenchResult run_grid(const BenchConfig& config, const std::vector<EstimatorKind>& estimators,
                     unsigned jobs) {
  std::vector<BenchmarkProblem> problems;
  std::vector<Metric> metrics;
  for (auto n : config.dimensions) {
    problems.push_back(build_problem(config, n));
    metrics.push_back(resolve_metric(config, problems.back()));
  }
  struct Task {
    std::size_t dim;
    std::size_t est;
    std::uint64_t rep;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < problems.size(); ++d)
    for (std::size_t e = 0; e < estimators.size(); ++e)
      for (std::uint64_t r = 0; r < config.replications; ++r) tasks.push_back({d, e, r});

  std::vector<RunOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    outcomes[i] = run_one(config, problems[t.dim], metrics[t.dim], estimators[t.est], t.rep,
                          substream_id(t.dim, t.est, t.rep), config.trajectories && t.rep == 0);
  });

  BenchResult result;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    result.rows.push_back(outcomes[i].row);
    if (!outcomes[i].trajectory.empty()) {
      result.trajectories.push_back(
          {problems[t.dim].id + "_n" + std::to_string(problems[t.dim].n) + "_" +
               std::string(to_string(estimators[t.est])),
           std::move(outcomes[i].trajectory)});
    }
    const auto& problem = problems[t.dim];
    if (problem.x_stable.has_value()) {
      TargetRow target;
      target.estimator = outcomes[i].row.estimator;
      target.replication = t.rep;
      target.final_iterate = outcomes[i].final_iterate;
      target.dist_star = (target.final_iterate - *problem.x_star).norm();
      target.dist_stable = (target.final_iterate - *problem.x_stable).norm();
      result.targets.push_back(std::move(target));
    }
  }
  check_budget(result.rows);
  result.summary = summarize(result.rows);
  return result;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

std::string timing(double ms, bool omit) {
  return omit ? "0" : std::to_string(std::llround(ms));
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::automatic: return "auto";
    case Metric::average_gap: return "average_gap";
    case Metric::last_gap: return "last_gap";
    case Metric::last_distance: return "last_distance";
    case Metric::last_residual: return "last_residual";
    case Metric::random_residual: return "random_residual";
    case Metric::random_smoothed_residual: return "random_smoothed_residual";
  }
  return "unknown";
}

Metric metric_from_string(std::string_view name) {
  for (auto m : {Metric::automatic, Metric::average_gap, Metric::last_gap, Metric::last_distance,
                 Metric::last_residual, Metric::random_residual,
                 Metric::random_smoothed_residual}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorCode::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

BenchConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config, "config syntax error at " + line_column(json_text, e.byte) + ": " +
                                e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::config, "config must be a JSON object");
  BenchConfig config;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) fail(ErrorCode::config, "config field '" + key + "': unknown key");
    it->second(config, key, value);
  }
  static const std::vector<std::string> known = {"quad_l1", "quadratic", "piecewise_linear",
                                                 "nonconvex", "market", "linear"};
  if (std::find(known.begin(), known.end(), config.problem) == known.end())
    field_error("problem", "unknown problem '" + config.problem + "'");
  return config;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

BenchmarkProblem build_problem(const BenchConfig& config, Eigen::Index n) {
  const std::string& id = config.problem;
  if (id == "quad_l1") return quad_l1_problem(n, config.instance_seed);
  if (id == "quadratic") return quadratic_problem(n, config.instance_seed);
  if (id == "piecewise_linear") return piecewise_linear_problem(n, config.mu);
  if (id == "nonconvex") return nonconvex_min_problem(n);
  if (id == "linear") return linear_problem(n, config.linear_lipschitz);
  if (id == "market") {
    require(n == 2, ErrorCode::config, "config field 'n': the market problem has n = 2");
    return market_problem(config.market);
  }
  fail(ErrorCode::config, "config field 'problem': unknown problem '" + id + "'");
}

Schedule build_schedule(const BenchConfig& config, const BenchmarkProblem& problem,
                        std::uint64_t horizon) {
  const double lipschitz = config.schedule_lipschitz.value_or(problem.lipschitz);
  switch (config.schedule) {
    case ScheduleKind::convex_diminishing:
      return Schedule::convex_diminishing(problem.n);
    case ScheduleKind::convex_constant:
      return Schedule::convex_constant(problem.n, std::max<std::uint64_t>(horizon, 1),
                                       config.radius.value_or(1.0), lipschitz);
    case ScheduleKind::strongly_convex: {
      const double mu = config.schedule_mu.value_or(problem.mu);
      require(mu > 0.0, ErrorCode::config,
              "strongly_convex schedule needs mu > 0 (set 'schedule_mu')");
      return Schedule::strongly_convex(config.theta.value_or(2.0 / mu), mu);
    }
    case ScheduleKind::nonconvex_fixed_eta:
      return Schedule::nonconvex_fixed_eta(config.eta, lipschitz, problem.n);
    case ScheduleKind::nonconvex_asymptotic:
      return Schedule::nonconvex_asymptotic(config.gamma_law.power, config.eta_law.power);
    case ScheduleKind::custom: {
      PowerLaw gamma = config.gamma_law;
      PowerLaw eta = config.eta_law;
      if (config.scale_by_q_norm) {
        require(problem.q_norm.has_value(), ErrorCode::config,
                "scale_by_q_norm needs a quadratic problem");
        gamma.scale /= *problem.q_norm;
        eta.scale /= *problem.q_norm;
      }
      return Schedule::custom(gamma, eta);
    }
  }
  fail(ErrorCode::config, "unknown schedule");
}

Metric resolve_metric(const BenchConfig& config, const BenchmarkProblem& problem) {
  if (config.metric != Metric::automatic) return config.metric;
  if (problem.x_stable.has_value()) return Metric::last_distance;
  if (problem.curvature == Curvature::nonconvex) return Metric::last_residual;
  return Metric::average_gap;
}

std::uint64_t budget_iterations(EstimatorKind kind, Eigen::Index n, std::uint64_t k) {
  const std::uint64_t budget = 2 * static_cast<std::uint64_t>(n) * k;
  return budget / calls_per_estimate(kind, n);
}

BenchResult run_benchmark(const BenchConfig& config, unsigned jobs) {
  require(config.problem != "market", ErrorCode::config,
          "the market problem runs through the dd command");
  for (auto kind : config.estimators)
    require(kind != EstimatorKind::dd_known && kind != EstimatorKind::dd_unknown,
            ErrorCode::config, "decision-dependent estimators run through the dd command");
  return run_grid(config, config.estimators, jobs);
}

BenchResult run_dd_benchmark(const BenchConfig& config, unsigned jobs) {
  require(config.problem == "market", ErrorCode::config,
          "the dd command needs problem = \"market\"");
  BenchConfig dd = config;
  dd.dimensions = {2};
  return run_grid(dd, {EstimatorKind::dd_known, EstimatorKind::dd_unknown}, jobs);
}

std::vector<MomentRow> run_moments(const BenchConfig& config, unsigned jobs) {
  struct Task {
    std::size_t dim;
    std::size_t est;
  };
  std::vector<BenchmarkProblem> problems;
  for (auto n : config.dimensions) problems.push_back(build_problem(config, n));
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < problems.size(); ++d)
    for (std::size_t e = 0; e < config.estimators.size(); ++e) tasks.push_back({d, e});

  std::vector<MomentRow> rows(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const auto& problem = problems[tasks[i].dim];
    const EstimatorKind kind = config.estimators[tasks[i].est];
    const Vector x = config.moment_at_origin ? Vector(Vector::Zero(problem.n)) : problem.x0;
    RandomStream stream(config.seed, substream_id(tasks[i].dim, tasks[i].est, 0));
    const MomentEstimate m = second_moment_probe(make_estimator(problem, kind), x,
                                                 SmoothingParams(config.moment_eta),
                                                 config.moment_samples, stream);
    const double dn = static_cast<double>(problem.n);
    const double l2 = problem.lipschitz * problem.lipschitz;
    rows[i] = {problem.id,
               problem.n,
               std::string(to_string(kind)),
               config.moment_eta,
               config.moment_samples,
               m.mean,
               m.standard_error,
               4.0 / std::numbers::pi * l2 * dn,
               l2 * (dn + 4.0) * (dn + 4.0)};
  });
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::tuple<std::string, Eigen::Index, std::string>, std::vector<const ResultRow*>>
      groups;
  std::vector<std::tuple<std::string, Eigen::Index, std::string>> order;
  for (const auto& row : rows) {
    const auto key = std::make_tuple(row.problem, row.n, row.estimator);
    auto& bucket = groups[key];
    if (bucket.empty()) order.push_back(key);
    bucket.push_back(&row);
  }
  for (const auto& key : order) {
    auto members = groups[key];
    // Accumulate in replication order so the result is independent of row order.
    std::sort(members.begin(), members.end(), [](const ResultRow* l, const ResultRow* r) {
      return l->replication < r->replication;
    });
    const double count = static_cast<double>(members.size());
    SummaryRow s;
    std::tie(s.problem, s.n, s.estimator) = key;
    s.replications = members.size();
    s.oracle_calls = members.front()->oracle_calls;
    for (const auto* m : members) {
      s.mean_error += m->error;
      s.mean_wall_time_ms += m->wall_time_ms;
    }
    s.mean_error /= count;
    s.mean_wall_time_ms /= count;
    if (members.size() > 1) {
      double se = 0.0;
      double st = 0.0;
      for (const auto* m : members) {
        se += (m->error - s.mean_error) * (m->error - s.mean_error);
        st += (m->wall_time_ms - s.mean_wall_time_ms) * (m->wall_time_ms - s.mean_wall_time_ms);
      }
      s.stddev_error = std::sqrt(se / (count - 1.0));
      s.stddev_wall_time_ms = std::sqrt(st / (count - 1.0));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TrajectoryRow> trajectory_rows(const Trajectory& traj,
                                           const BenchmarkProblem& problem) {
  require(traj.iterates.size() == traj.oracle_calls_cumulative.size(), ErrorCode::invalid_argument,
          "trajectory_rows: iterates were not recorded");
  std::vector<TrajectoryRow> rows;
  rows.reserve(traj.iterates.size());
  for (std::uint64_t k = 0; k < traj.iterates.size(); ++k)
    rows.push_back({k, error_metric(problem, traj.iterates[k]), traj.oracle_calls_cumulative[k]});
  return rows;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path,
              bool omit_timing) {
  std::string text = "problem,n,estimator,replication,error,wall_time_ms,oracle_calls,seed\n";
  for (const auto& r : rows) {
    text += r.problem + "," + std::to_string(r.n) + "," + r.estimator + "," +
            std::to_string(r.replication) + "," + format_double(r.error) + "," +
            timing(r.wall_time_ms, omit_timing) + "," + std::to_string(r.oracle_calls) + "," +
            std::to_string(r.seed) + "\n";
  }
  write_text(path, text);
}

void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path,
                      bool omit_timing) {
  std::string text =
      "problem,n,estimator,replications,mean_error,stddev_error,mean_wall_time_ms,"
      "stddev_wall_time_ms,oracle_calls\n";
  for (const auto& s : rows) {
    text += s.problem + "," + std::to_string(s.n) + "," + s.estimator + "," +
            std::to_string(s.replications) + "," + format_double(s.mean_error) + "," +
            format_double(s.stddev_error) + "," +
            (omit_timing ? "0" : format_double(s.mean_wall_time_ms)) + "," +
            (omit_timing ? "0" : format_double(s.stddev_wall_time_ms)) + "," +
            std::to_string(s.oracle_calls) + "\n";
  }
  write_text(path, text);
}

void emit_trajectory(const std::vector<TrajectoryRow>& rows, const std::filesystem::path& path) {
  std::string text = "k,error,oracle_calls\n";
  for (const auto& r : rows)
    text += std::to_string(r.k) + "," + format_double(r.error) + "," +
            std::to_string(r.oracle_calls) + "\n";
  write_text(path, text);
}

void emit_targets_csv(const std::vector<TargetRow>& rows, std::uint64_t seed,
                      const std::filesystem::path& path) {
  std::string text = "estimator,replication,x1,x2,dist_star,dist_stable,seed\n";
  for (const auto& r : rows) {
    text += r.estimator + "," + std::to_string(r.replication) + "," +
            format_double(r.final_iterate[0]) + "," + format_double(r.final_iterate[1]) + "," +
            format_double(r.dist_star) + "," + format_double(r.dist_stable) + "," +
            std::to_string(seed) + "\n";
  }
  write_text(path, text);
}

void emit_moments_csv(const std::vector<MomentRow>& rows, const std::filesystem::path& path) {
  std::string text =
      "problem,n,estimator,eta,samples,second_moment,standard_error,esgs_bound,gs_bound\n";
  for (const auto& r : rows) {
    text += r.problem + "," + std::to_string(r.n) + "," + r.estimator + "," +
            format_double(r.eta) + "," + std::to_string(r.samples) + "," +
            format_double(r.second_moment) + "," + format_double(r.standard_error) + "," +
            format_double(r.esgs_bound) + "," + format_double(r.gs_bound) + "\n";
  }
  write_text(path, text);
}

void write_outputs(const BenchResult& result, std::uint64_t seed,
                   const std::filesystem::path& dir, bool omit_timing) {
  emit_csv(result.rows, dir / "results.csv", omit_timing);
  emit_summary_csv(result.summary, dir / "summary.csv", omit_timing);
  for (const auto& dump : result.trajectories)
    emit_trajectory(dump.rows, dir / "trajectories" / (dump.name + ".csv"));
  if (!result.targets.empty()) emit_targets_csv(result.targets, seed, dir / "targets.csv");
}

std::filesystem::path resolve_output_dir(const BenchConfig& config,
                                         const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (const char* env = std::getenv("ESGS_OUT_DIR"); env != nullptr && *env != '\0') return env;
  if (!config.output_dir.empty()) return config.output_dir;
  return ".";
}

namespace {

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) text.insert(0, width - text.size(), ' ');
  return text;
}

std::string fixed(double value, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << value;
  return out.str();
}

std::string summary_table(const std::vector<SummaryRow>& rows, bool omit_timing) {
  std::string text = pad("problem", 18) + pad("n", 7) + pad("estimator", 17) + pad("reps", 6) +
                     pad("mean_error", 14) + pad("stddev", 14) + pad("time_ms", 11) +
                     pad("calls", 12) + "\n";
  for (const auto& s : rows) {
    text += pad(s.problem, 18) + pad(std::to_string(s.n), 7) + pad(s.estimator, 17) +
            pad(std::to_string(s.replications), 6) + pad(fixed(s.mean_error, 6), 14) +
            pad(fixed(s.stddev_error, 6), 14) +
            pad(omit_timing ? "-" : fixed(s.mean_wall_time_ms, 1), 11) +
            pad(std::to_string(s.oracle_calls), 12) + "\n";
  }
  return text;
}

}  // namespace

std::string run_command(std::string_view command, BenchConfig config,
                        const CommandOptions& options) {
  if (options.seed) config.seed = *options.seed;
  const std::filesystem::path dir = resolve_output_dir(config, options.out_dir);
  const unsigned jobs = std::max(1u, options.jobs);
  std::string report;
  if (command == "moments") {
    const auto rows = run_moments(config, jobs);
    emit_moments_csv(rows, dir / "moments.csv");
    report = pad("problem", 18) + pad("n", 7) + pad("estimator", 17) + pad("E|g|^2", 14) +
             pad("stderr", 12) + pad("(4/pi)L0^2 n", 14) + pad("L0^2(n+4)^2", 14) + "\n";
    for (const auto& r : rows) {
      report += pad(r.problem, 18) + pad(std::to_string(r.n), 7) + pad(r.estimator, 17) +
                pad(format_double(r.second_moment).substr(0, 12), 14) +
                pad(format_double(r.standard_error).substr(0, 10), 12) +
                pad(format_double(r.esgs_bound).substr(0, 12), 14) +
                pad(format_double(r.gs_bound).substr(0, 12), 14) + "\n";
    }
  } else if (command == "run" || command == "compare") {
    if (command == "run")
      require(config.dimensions.size() == 1, ErrorCode::config,
              "config field 'n': run takes a single dimension; use compare for a grid");
    const BenchResult result = run_benchmark(config, jobs);
    write_outputs(result, config.seed, dir, options.omit_timing);
    report = summary_table(result.summary, options.omit_timing);
  } else if (command == "dd") {
    const BenchResult result = run_dd_benchmark(config, jobs);
    write_outputs(result, config.seed, dir, options.omit_timing);
    report = summary_table(result.summary, options.omit_timing);
    std::map<std::string, std::pair<double, double>> sums;
    std::map<std::string, double> x1_sums;
    std::vector<std::string> order;
    for (const auto& t : result.targets) {
      if (!sums.count(t.estimator)) order.push_back(t.estimator);
      sums[t.estimator].first += t.dist_star;
      sums[t.estimator].second += t.dist_stable;
      x1_sums[t.estimator] += t.final_iterate[0];
    }
    const double reps = static_cast<double>(config.replications);
    for (const auto& name : order) {
      report += name + ": mean x1 " + fixed(x1_sums[name] / reps, 6) + ", mean |x - x*| " +
                fixed(sums[name].first / reps, 6) + ", mean |x - x_stable| " +
                fixed(sums[name].second / reps, 6) + "\n";
    }
  } else {
    fail(ErrorCode::invalid_argument, "unknown command '" + std::string(command) +
                                          "' (expected moments, run, compare or dd)");
  }
  return report + "wrote " + dir.string() + "\n";
}

}  // namespace esgs
