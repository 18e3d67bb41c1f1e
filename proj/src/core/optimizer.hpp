#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "estimators.hpp"
#include "projections.hpp"
#include "random.hpp"

namespace esgs {

enum class ScheduleKind {
  convex_diminishing,
  convex_constant,
  strongly_convex,
  nonconvex_fixed_eta,
  nonconvex_asymptotic,
  custom
};

std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_from_string(std::string_view name);

/// scale / (k + offset)^power
struct PowerLaw {
  double scale = 1.0;
  double power = 0.5;
  double offset = 1.0;
  double operator()(std::uint64_t k) const;
};

// Step-size and smoothing-radius sequences (gamma_k, eta_k). Constructed only
// through the factories, which validate the kind's parameters.
class Schedule {
 public:
  /// gamma_k = eta_k = 1 / sqrt(n (k + 1))
  static Schedule convex_diminishing(Eigen::Index n);
  /// gamma_k = R / (L0 sqrt(n K)), eta_k = 1 / sqrt(n K)
  static Schedule convex_constant(Eigen::Index n, std::uint64_t horizon, double radius,
                                  double lipschitz);
  /// gamma_k = eta_k = theta / k for k >= 1, requires theta > 1 / mu
  static Schedule strongly_convex(double theta, double mu);
  /// gamma_k = eta / (L0 sqrt(n) sqrt(k + 1)), eta_k = eta
  static Schedule nonconvex_fixed_eta(double eta, double lipschitz, Eigen::Index n);
  /// gamma_k = (k + 1)^-alpha, eta_k = (k + 1)^-beta with 2 alpha - beta > 1
  static Schedule nonconvex_asymptotic(double alpha, double beta);
  static Schedule custom(PowerLaw gamma, PowerLaw eta);

  ScheduleKind kind() const { return kind_; }
  /// Index of the first step: 1 for strongly_convex, otherwise 0.
  std::uint64_t first_index() const { return kind_ == ScheduleKind::strongly_convex ? 1 : 0; }
  /// (gamma_k, eta_k)
  std::pair<double, double> values(std::uint64_t k) const;
  std::string describe() const;

 private:
  Schedule(ScheduleKind kind, PowerLaw gamma, PowerLaw eta)
      : kind_(kind), gamma_(gamma), eta_(eta) {}
  ScheduleKind kind_;
  PowerLaw gamma_;
  PowerLaw eta_;
};

inline std::pair<double, double> schedule_values(const Schedule& s, std::uint64_t k) {
  return s.values(k);
}

/// Pi_X[x - gamma g]
Vector step(const Vector& x, const Vector& gradient, double gamma, const FeasibleSet& set);

struct RunOptions {
  /// Keep x_0..x_K. Off for long baseline runs; the weighted average and the
  /// final iterate are always tracked.
  bool record_iterates = true;
  /// Called with (k, x_k) for k = 0..K before each step and after the last.
  std::function<void(std::uint64_t, const Vector&)> observer;
};

struct Trajectory {
  std::vector<Vector> iterates;  // x_0..x_K when recorded
  std::vector<double> gammas;    // gamma_0..gamma_{K-1}
  std::vector<double> etas;
  std::vector<std::uint64_t> oracle_calls_cumulative;  // K + 1 entries, starts at 0
  double wall_time_ms = 0.0;
  Vector final_iterate;
  Vector weighted_sum;  // sum_{k<K} gamma_k x_k
  double gamma_sum = 0.0;

  std::uint64_t steps() const { return gammas.size(); }
  std::uint64_t total_oracle_calls() const {
    return oracle_calls_cumulative.empty() ? 0 : oracle_calls_cumulative.back();
  }
};

/// K steps of x_{k+1} = Pi_X[x_k - gamma_k g(x_k; eta_k)]. x0 is projected first.
Trajectory run(const Estimator& estimator, const Schedule& schedule, std::uint64_t iterations,
               const FeasibleSet& set, const Vector& x0, RandomStream& stream,
               const RunOptions& options = {});

/// sum_{k<K} gamma_k x_k / sum_{k<K} gamma_k; x_0 when K = 0.
Vector weighted_average(const Trajectory& traj);

/// x_j with P[j] proportional to gamma_j, j < K. Needs recorded iterates.
Vector sample_random_iterate(const Trajectory& traj, RandomStream& stream);
/// The index drawn by sample_random_iterate.
std::uint64_t sample_random_index(const std::vector<double>& gammas, RandomStream& stream);

}  // namespace esgs
