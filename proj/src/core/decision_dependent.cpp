#include "decision_dependent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "error.hpp"

namespace esgs {

namespace {

std::string describe_noise(const Noise& xi) {
  std::ostringstream out;
  out.precision(17);
  out << "(";
  for (Eigen::Index k = 0; k < xi.size(); ++k) out << (k ? ", " : "") << xi[k];
  out << ")";
  return out.str();
}

double checked_ratio(const KnownDensityOracle& oracle, const Noise& xi, const Vector& x,
                     double bound) {
  const double ratio = oracle.density_ratio(xi, x);
  if (!(ratio <= bound))
    fail(ErrorCode::ratio_bound, "density ratio " + std::to_string(ratio) + " exceeds M = " +
                                     std::to_string(bound) + " at xi = " + describe_noise(xi));
  return ratio;
}

}  // namespace

double KnownDensityOracle::density_ratio(const Noise& xi, const Vector& x) const {
  return conditional_density(xi, x) / reference_density(xi);
}

double RandomFieldOracle::lipschitz() const {
  return joint_lipschitz() * std::sqrt(2.0 + 2.0 * field_constant());
}

GradientSample esgs_dd_known_at(const KnownDensityOracle& oracle, const Vector& x,
                                const SmoothingParams& params, double v, const Vector& z,
                                const Noise& xi) {
  const Eigen::Index n = oracle.dimension();
  require(x.size() == n && z.size() == n, ErrorCode::dimension_mismatch,
          "esgs_dd_known: dimension mismatch");
  const double bound = oracle.constants().ratio_bound_m;
  const double shift = params.eta * std::sqrt(2.0 * v);
  const double scale = 1.0 / (params.eta * std::sqrt(2.0 * std::numbers::pi));

  GradientSample sample;
  sample.estimate.resize(n);
  Vector point = x - z;
  for (Eigen::Index i = 0; i < n; ++i) {
    point[i] = x[i] + shift;
    const double up = oracle.value(point, xi) * checked_ratio(oracle, xi, point, bound);
    point[i] = x[i] - shift;
    const double down = oracle.value(point, xi) * checked_ratio(oracle, xi, point, bound);
    point[i] = x[i] - z[i];
    sample.estimate[i] = scale * (up - down);
  }
  sample.v = v;
  sample.z = z;
  sample.oracle_calls = 2 * static_cast<std::uint64_t>(n);
  return sample;
}

GradientSample esgs_dd_known(const KnownDensityOracle& oracle, const Vector& x,
                             const SmoothingParams& params, RandomStream& stream) {
  const Noise xi = oracle.sample_reference(stream);
  const double v = sample_exponential(stream);
  const Vector z = sample_gaussian_vector(x.size(), params.eta, stream);
  return esgs_dd_known_at(oracle, x, params, v, z, xi);
}

GradientSample esgs_dd_unknown(const RandomFieldOracle& oracle, const Vector& x,
                               const SmoothingParams& params, RandomStream& stream) {
  const Eigen::Index n = oracle.dimension();
  require(x.size() == n, ErrorCode::dimension_mismatch, "esgs_dd_unknown: dimension mismatch");
  const double v = sample_exponential(stream);
  const Vector z = sample_gaussian_vector(n, params.eta, stream);
  const double shift = params.eta * std::sqrt(2.0 * v);
  const double scale = 1.0 / (params.eta * std::sqrt(2.0 * std::numbers::pi));

  GradientSample sample;
  sample.estimate.resize(n);
  Vector plus = x - z;
  Vector minus = x - z;
  for (Eigen::Index i = 0; i < n; ++i) {
    plus[i] = x[i] + shift;
    minus[i] = x[i] - shift;
    const auto [xi_plus, xi_minus] = oracle.sample_pair(plus, minus, stream);
    sample.estimate[i] = scale * (oracle.value(plus, xi_plus) - oracle.value(minus, xi_minus));
    plus[i] = x[i] - z[i];
    minus[i] = x[i] - z[i];
  }
  sample.v = v;
  sample.z = z;
  sample.oracle_calls = 2 * static_cast<std::uint64_t>(n);
  return sample;
}

Estimator make_estimator(std::shared_ptr<const KnownDensityOracle> oracle) {
  require(oracle != nullptr, ErrorCode::invalid_argument, "make_estimator: null oracle");
  return [oracle = std::move(oracle)](const Vector& x, const SmoothingParams& params,
                                      RandomStream& stream) {
    return esgs_dd_known(*oracle, x, params, stream);
  };
}

Estimator make_estimator(std::shared_ptr<const RandomFieldOracle> oracle) {
  require(oracle != nullptr, ErrorCode::invalid_argument, "make_estimator: null oracle");
  return [oracle = std::move(oracle)](const Vector& x, const SmoothingParams& params,
                                      RandomStream& stream) {
    return esgs_dd_unknown(*oracle, x, params, stream);
  };
}

double kl_sym_normal(double mean_x, double mean_y, double sigma) {
  require(sigma > 0.0, ErrorCode::invalid_argument, "kl_sym_normal: sigma must be positive");
  const double diff = mean_x - mean_y;
  return diff * diff / (sigma * sigma);
}

double field_correlation(double x_plus, double x_minus, double c_xi, double beta, double sigma) {
  require(sigma > 0.0, ErrorCode::invalid_argument, "field_correlation: sigma must be positive");
  require(c_xi >= beta * beta, ErrorCode::invalid_argument,
          "field_correlation: c_xi must be >= beta^2");
  const double gap = x_plus - x_minus;
  return std::max(1.0 - (c_xi - beta * beta) * gap * gap / (2.0 * sigma * sigma), -1.0);
}

}  // namespace esgs
