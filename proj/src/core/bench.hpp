#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "estimators.hpp"
#include "optimizer.hpp"
#include "problems.hpp"

namespace esgs {

enum class Metric {
  automatic,
  average_gap,       // f(x_bar_K) - f*
  last_gap,          // f(x_K) - f*
  last_distance,     // ||x_K - x*||
  last_residual,     // ||grad f(x_K)||^2
  random_residual,   // ||grad f(x_{R_K})||^2
  random_smoothed_residual  // ||grad f_eta(x_{R_K})||^2
};

std::string_view to_string(Metric metric);
Metric metric_from_string(std::string_view name);

struct BenchConfig {
  std::string problem = "quad_l1";
  std::vector<Eigen::Index> dimensions = {10};
  std::uint64_t instance_seed = 1;
  double mu = 0.0;
  double linear_lipschitz = 1.0;
  MarketParams market;

  std::vector<EstimatorKind> estimators = {EstimatorKind::esgs, EstimatorKind::gaussian};
  ScheduleKind schedule = ScheduleKind::convex_diminishing;
  std::optional<double> theta;
  std::optional<double> schedule_mu;
  std::optional<double> radius;
  std::optional<double> schedule_lipschitz;
  double eta = 0.1;
  PowerLaw gamma_law{1.0, 0.5, 1.0};
  PowerLaw eta_law{1.0, 0.5, 1.0};
  bool scale_by_q_norm = false;

  std::uint64_t iterations = 200;
  std::uint64_t replications = 20;
  std::uint64_t seed = 1;
  Metric metric = Metric::automatic;
  bool trajectories = false;
  std::string output_dir;

  std::uint64_t moment_samples = 10000;
  double moment_eta = 0.1;
  bool moment_at_origin = false;
};

/// Parses the flat JSON config. Unknown keys and malformed fields are errors
/// naming the offending key or the line and column of a syntax error.
BenchConfig parse_config(std::string_view json_text);
BenchConfig load_config(const std::filesystem::path& path);

BenchmarkProblem build_problem(const BenchConfig& config, Eigen::Index n);
Schedule build_schedule(const BenchConfig& config, const BenchmarkProblem& problem,
                        std::uint64_t horizon);
Metric resolve_metric(const BenchConfig& config, const BenchmarkProblem& problem);
/// Iterations for the estimator under the 2nK budget: K for coordinate-wise
/// estimators, nK for two-point ones.
std::uint64_t budget_iterations(EstimatorKind kind, Eigen::Index n, std::uint64_t k);

struct ResultRow {
  std::string problem;
  Eigen::Index n = 0;
  std::string estimator;
  std::uint64_t replication = 0;
  double error = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t seed = 0;
};

struct SummaryRow {
  std::string problem;
  Eigen::Index n = 0;
  std::string estimator;
  std::uint64_t replications = 0;
  double mean_error = 0.0;
  double stddev_error = 0.0;
  double mean_wall_time_ms = 0.0;
  double stddev_wall_time_ms = 0.0;
  std::uint64_t oracle_calls = 0;
};

struct TrajectoryRow {
  std::uint64_t k = 0;
  double error = 0.0;
  std::uint64_t oracle_calls = 0;
};

struct TrajectoryDump {
  std::string name;
  std::vector<TrajectoryRow> rows;
};

struct TargetRow {
  std::string estimator;
  std::uint64_t replication = 0;
  Vector final_iterate;
  double dist_star = 0.0;
  double dist_stable = 0.0;
};

struct BenchResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<TrajectoryDump> trajectories;
  std::vector<TargetRow> targets;  // dd runs only
};

/// Replications x estimators x dimensions under equal oracle budgets. Throws
/// config errors on an unresolvable budget.
BenchResult run_benchmark(const BenchConfig& config, unsigned jobs = 1);
/// Both decision-dependent modes on the market problem, with distances of the
/// final iterates to x* and to the performatively stable point.
BenchResult run_dd_benchmark(const BenchConfig& config, unsigned jobs = 1);

struct MomentRow {
  std::string problem;
  Eigen::Index n = 0;
  std::string estimator;
  double eta = 0.0;
  std::uint64_t samples = 0;
  double second_moment = 0.0;
  double standard_error = 0.0;
  double esgs_bound = 0.0;  // (4/pi) L0^2 n
  double gs_bound = 0.0;    // L0^2 (n + 4)^2
};
std::vector<MomentRow> run_moments(const BenchConfig& config, unsigned jobs = 1);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::vector<TrajectoryRow> trajectory_rows(const Trajectory& traj,
                                           const BenchmarkProblem& problem);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// When omit_timing is set, wall times are written as 0 so that reruns are
/// byte-identical.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path,
              bool omit_timing = false);
void emit_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path,
                      bool omit_timing = false);
void emit_trajectory(const std::vector<TrajectoryRow>& rows, const std::filesystem::path& path);
void emit_targets_csv(const std::vector<TargetRow>& rows, std::uint64_t seed,
                      const std::filesystem::path& path);
void emit_moments_csv(const std::vector<MomentRow>& rows, const std::filesystem::path& path);

/// Writes every table of a result into dir (created if needed).
void write_outputs(const BenchResult& result, std::uint64_t seed,
                   const std::filesystem::path& dir, bool omit_timing);

/// --out if given, else $ESGS_OUT_DIR, else the config's output_dir, else ".".
std::filesystem::path resolve_output_dir(const BenchConfig& config,
                                         const std::optional<std::string>& cli_out);

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  unsigned jobs = 1;
  bool omit_timing = false;
};

/// Executes a harness command ("moments", "run", "compare", "dd"), writes its
/// tables and returns a printable report.
std::string run_command(std::string_view command, BenchConfig config,
                        const CommandOptions& options);

}  // namespace esgs
