#include "optimizer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace esgs {

namespace {

void require_positive(double value, const char* what) {
  require(value > 0.0 && std::isfinite(value), ErrorCode::invalid_argument,
          std::string("schedule: ") + what + " must be positive and finite");
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::convex_diminishing: return "convex_diminishing";
    case ScheduleKind::convex_constant: return "convex_constant";
    case ScheduleKind::strongly_convex: return "strongly_convex";
    case ScheduleKind::nonconvex_fixed_eta: return "nonconvex_fixed_eta";
    case ScheduleKind::nonconvex_asymptotic: return "nonconvex_asymptotic";
    case ScheduleKind::custom: return "custom";
  }
  return "unknown";
}

ScheduleKind schedule_from_string(std::string_view name) {
  for (auto kind : {ScheduleKind::convex_diminishing, ScheduleKind::convex_constant,
                    ScheduleKind::strongly_convex, ScheduleKind::nonconvex_fixed_eta,
                    ScheduleKind::nonconvex_asymptotic, ScheduleKind::custom}) {
    if (name == to_string(kind)) return kind;
  }
  fail(ErrorCode::invalid_argument, "unknown schedule '" + std::string(name) + "'");
}

double PowerLaw::operator()(std::uint64_t k) const {
  const double base = static_cast<double>(k) + offset;
  return power == 0.0 ? scale : scale / std::pow(base, power);
}

Schedule Schedule::convex_diminishing(Eigen::Index n) {
  require(n >= 1, ErrorCode::invalid_argument, "schedule: n must be >= 1");
  const PowerLaw law{1.0 / std::sqrt(static_cast<double>(n)), 0.5, 1.0};
  return Schedule(ScheduleKind::convex_diminishing, law, law);
}

Schedule Schedule::convex_constant(Eigen::Index n, std::uint64_t horizon, double radius,
                                   double lipschitz) {
  require(n >= 1, ErrorCode::invalid_argument, "schedule: n must be >= 1");
  require(horizon >= 1, ErrorCode::invalid_argument, "schedule: K must be >= 1");
  require_positive(radius, "R");
  require_positive(lipschitz, "L0");
  const double root = std::sqrt(static_cast<double>(n) * static_cast<double>(horizon));
  return Schedule(ScheduleKind::convex_constant, PowerLaw{radius / (lipschitz * root), 0.0, 0.0},
                  PowerLaw{1.0 / root, 0.0, 0.0});
}

Schedule Schedule::strongly_convex(double theta, double mu) {
  require_positive(theta, "theta");
  require_positive(mu, "mu");
  require(theta * mu > 1.0, ErrorCode::invalid_argument,
          "schedule: strongly_convex requires theta > 1/mu");
  const PowerLaw law{theta, 1.0, 0.0};
  return Schedule(ScheduleKind::strongly_convex, law, law);
}

Schedule Schedule::nonconvex_fixed_eta(double eta, double lipschitz, Eigen::Index n) {
  require_positive(eta, "eta");
  require_positive(lipschitz, "L0");
  require(n >= 1, ErrorCode::invalid_argument, "schedule: n must be >= 1");
  return Schedule(ScheduleKind::nonconvex_fixed_eta,
                  PowerLaw{eta / (lipschitz * std::sqrt(static_cast<double>(n))), 0.5, 1.0},
                  PowerLaw{eta, 0.0, 0.0});
}

Schedule Schedule::nonconvex_asymptotic(double alpha, double beta) {
  require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument,
          "schedule: nonconvex_asymptotic requires 0 < alpha, beta < 1");
  require(2.0 * alpha - beta > 1.0, ErrorCode::invalid_argument,
          "schedule: nonconvex_asymptotic requires 2 alpha - beta > 1");
  return Schedule(ScheduleKind::nonconvex_asymptotic, PowerLaw{1.0, alpha, 1.0},
                  PowerLaw{1.0, beta, 1.0});
}

Schedule Schedule::custom(PowerLaw gamma, PowerLaw eta) {
  require_positive(gamma.scale, "gamma scale");
  require_positive(eta.scale, "eta scale");
  require(gamma.power >= 0.0 && eta.power >= 0.0, ErrorCode::invalid_argument,
          "schedule: powers must be >= 0");
  require(gamma.offset > 0.0 || gamma.power == 0.0, ErrorCode::invalid_argument,
          "schedule: gamma offset must be positive");
  require(eta.offset > 0.0 || eta.power == 0.0, ErrorCode::invalid_argument,
          "schedule: eta offset must be positive");
  return Schedule(ScheduleKind::custom, gamma, eta);
}

std::pair<double, double> Schedule::values(std::uint64_t k) const {
  require(k >= first_index(), ErrorCode::invalid_argument,
          "schedule: strongly_convex is defined for k >= 1");
  return {gamma_(k), eta_(k)};
}

std::string Schedule::describe() const {
  std::ostringstream out;
  out << to_string(kind_) << " gamma=" << gamma_.scale << "/(k+" << gamma_.offset << ")^"
      << gamma_.power << " eta=" << eta_.scale << "/(k+" << eta_.offset << ")^" << eta_.power;
  return out.str();
}

Vector step(const Vector& x, const Vector& gradient, double gamma, const FeasibleSet& set) {
  require(x.size() == gradient.size(), ErrorCode::dimension_mismatch,
          "step: point and gradient dimensions differ");
  return set.project(x - gamma * gradient);
}

Trajectory run(const Estimator& estimator, const Schedule& schedule, std::uint64_t iterations,
               const FeasibleSet& set, const Vector& x0, RandomStream& stream,
               const RunOptions& options) {
  require(static_cast<bool>(estimator), ErrorCode::invalid_argument, "run: empty estimator");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  Trajectory traj;
  traj.gammas.reserve(iterations);
  traj.etas.reserve(iterations);
  traj.oracle_calls_cumulative.reserve(iterations + 1);
  if (options.record_iterates) traj.iterates.reserve(iterations + 1);

  Vector x = set.project(x0);
  traj.weighted_sum = Vector::Zero(x.size());
  traj.oracle_calls_cumulative.push_back(0);
  std::uint64_t calls = 0;
  const std::uint64_t k0 = schedule.first_index();
  for (std::uint64_t j = 0; j < iterations; ++j) {
    if (options.record_iterates) traj.iterates.push_back(x);
    if (options.observer) options.observer(j, x);
    const auto [gamma, eta] = schedule.values(k0 + j);
    const GradientSample sample = estimator(x, SmoothingParams(eta), stream);
    traj.weighted_sum += gamma * x;
    traj.gamma_sum += gamma;
    x = step(x, sample.estimate, gamma, set);
    calls += sample.oracle_calls;
    traj.gammas.push_back(gamma);
    traj.etas.push_back(eta);
    traj.oracle_calls_cumulative.push_back(calls);
  }
  if (options.record_iterates) traj.iterates.push_back(x);
  if (options.observer) options.observer(iterations, x);
  traj.final_iterate = std::move(x);
  traj.wall_time_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return traj;
}

Vector weighted_average(const Trajectory& traj) {
  if (traj.gamma_sum > 0.0) return traj.weighted_sum / traj.gamma_sum;
  require(!traj.iterates.empty(), ErrorCode::invalid_argument,
          "weighted_average: empty trajectory");
  return traj.iterates.front();
}

std::uint64_t sample_random_index(const std::vector<double>& gammas, RandomStream& stream) {
  require(!gammas.empty(), ErrorCode::invalid_argument, "sample_random_index: no steps");
  double total = 0.0;
  for (double g : gammas) total += g;
  const double target = stream.uniform() * total;
  double acc = 0.0;
  for (std::uint64_t j = 0; j < gammas.size(); ++j) {
    acc += gammas[j];
    if (target < acc) return j;
  }
  return gammas.size() - 1;
}

Vector sample_random_iterate(const Trajectory& traj, RandomStream& stream) {
  if (traj.gammas.empty()) {
    require(!traj.iterates.empty(), ErrorCode::invalid_argument,
            "sample_random_iterate: empty trajectory");
    return traj.iterates.front();
  }
  require(traj.iterates.size() == traj.gammas.size() + 1, ErrorCode::invalid_argument,
          "sample_random_iterate: iterates were not recorded");
  return traj.iterates[sample_random_index(traj.gammas, stream)];
}

}  // namespace esgs
