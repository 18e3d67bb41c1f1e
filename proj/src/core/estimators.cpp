#include "estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "error.hpp"

namespace esgs {

namespace {

void check_point(const StochasticOracle& oracle, const Vector& x) {
  require(x.size() == oracle.dimension(), ErrorCode::dimension_mismatch,
          "estimator: point has dimension " + std::to_string(x.size()) + ", oracle expects " +
              std::to_string(oracle.dimension()));
}

}  // namespace

SmoothingParams::SmoothingParams(double eta_value) : eta(eta_value) {
  require(eta > 0.0 && std::isfinite(eta), ErrorCode::invalid_argument,
          "smoothing radius eta must be positive and finite, got " + std::to_string(eta));
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::esgs: return "esgs";
    case EstimatorKind::gaussian: return "gs";
    case EstimatorKind::spherical: return "spherical";
    case EstimatorKind::spsa: return "spsa";
    case EstimatorKind::dd_known: return "esgs_dd_known";
    case EstimatorKind::dd_unknown: return "esgs_dd_unknown";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  if (name == "esgs") return EstimatorKind::esgs;
  if (name == "gs" || name == "gaussian") return EstimatorKind::gaussian;
  if (name == "spherical") return EstimatorKind::spherical;
  if (name == "spsa") return EstimatorKind::spsa;
  if (name == "esgs_dd_known" || name == "dd_known") return EstimatorKind::dd_known;
  if (name == "esgs_dd_unknown" || name == "dd_unknown") return EstimatorKind::dd_unknown;
  fail(ErrorCode::invalid_argument, "unknown estimator '" + std::string(name) + "'");
}

std::uint64_t calls_per_estimate(EstimatorKind kind, Eigen::Index n) {
  switch (kind) {
    case EstimatorKind::esgs:
    case EstimatorKind::dd_known:
    case EstimatorKind::dd_unknown:
      return 2 * static_cast<std::uint64_t>(n);
    default:
      return 2;
  }
}

GradientSample esgs_estimate_at(const StochasticOracle& oracle, const Vector& x,
                                const SmoothingParams& params, double v, const Vector& z,
                                const Noise& xi) {
  check_point(oracle, x);
  require(z.size() == x.size(), ErrorCode::dimension_mismatch, "esgs: z has wrong dimension");
  require(v >= 0.0, ErrorCode::invalid_argument, "esgs: exponential variate must be >= 0");
  const double shift = params.eta * std::sqrt(2.0 * v);
  const Vector base = x - z;
  const Vector upper = x.array() + shift;
  const Vector lower = x.array() - shift;
  Vector f_upper, f_lower;
  oracle.coordinate_sweep(base, upper, lower, xi, f_upper, f_lower);

  GradientSample sample;
  sample.estimate = (f_upper - f_lower) / (params.eta * std::sqrt(2.0 * std::numbers::pi));
  sample.v = v;
  sample.z = z;
  sample.oracle_calls = 2 * static_cast<std::uint64_t>(x.size());
  return sample;
}

GradientSample esgs_estimate(const StochasticOracle& oracle, const Vector& x,
                             const SmoothingParams& params, RandomStream& stream) {
  const double v = sample_exponential(stream);
  const Vector z = sample_gaussian_vector(x.size(), params.eta, stream);
  const Noise xi = oracle.sample_noise(stream);
  return esgs_estimate_at(oracle, x, params, v, z, xi);
}

GradientSample gs_estimate_at(const StochasticOracle& oracle, const Vector& x,
                              const SmoothingParams& params, const Vector& z, const Noise& xi) {
  check_point(oracle, x);
  require(z.size() == x.size(), ErrorCode::dimension_mismatch, "gs: z has wrong dimension");
  const double f_shift = oracle.value(x + params.eta * z, xi);
  const double f_base = oracle.value(x, xi);
  GradientSample sample;
  sample.estimate = ((f_shift - f_base) / params.eta) * z;
  sample.z = z;
  sample.oracle_calls = 2;
  return sample;
}

GradientSample gs_estimate(const StochasticOracle& oracle, const Vector& x,
                           const SmoothingParams& params, RandomStream& stream) {
  const Vector z = sample_gaussian_vector(x.size(), 1.0, stream);
  const Noise xi = oracle.sample_noise(stream);
  return gs_estimate_at(oracle, x, params, z, xi);
}

GradientSample spherical_estimate_at(const StochasticOracle& oracle, const Vector& x,
                                     const SmoothingParams& params, const Vector& u,
                                     const Noise& xi) {
  check_point(oracle, x);
  require(u.size() == x.size(), ErrorCode::dimension_mismatch,
          "spherical: direction has wrong dimension");
  const double n = static_cast<double>(x.size());
  const double diff = oracle.value(x + params.eta * u, xi) - oracle.value(x - params.eta * u, xi);
  GradientSample sample;
  sample.estimate = (n / (2.0 * params.eta)) * diff * u;
  sample.z = u;
  sample.oracle_calls = 2;
  return sample;
}

GradientSample spherical_estimate(const StochasticOracle& oracle, const Vector& x,
                                  const SmoothingParams& params, RandomStream& stream) {
  const Vector u = sample_unit_sphere(x.size(), stream);
  const Noise xi = oracle.sample_noise(stream);
  return spherical_estimate_at(oracle, x, params, u, xi);
}

GradientSample spsa_estimate_at(const StochasticOracle& oracle, const Vector& x,
                                const SmoothingParams& params, const Vector& delta,
                                const Noise& xi) {
  check_point(oracle, x);
  require(delta.size() == x.size(), ErrorCode::dimension_mismatch,
          "spsa: perturbation has wrong dimension");
  const double diff =
      oracle.value(x + params.eta * delta, xi) - oracle.value(x - params.eta * delta, xi);
  GradientSample sample;
  sample.estimate = (diff / (2.0 * params.eta)) * delta.cwiseInverse();
  sample.z = delta;
  sample.oracle_calls = 2;
  return sample;
}

GradientSample spsa_estimate(const StochasticOracle& oracle, const Vector& x,
                             const SmoothingParams& params, RandomStream& stream) {
  Vector delta(x.size());
  for (Eigen::Index i = 0; i < delta.size(); ++i) delta[i] = stream.rademacher();
  const Noise xi = oracle.sample_noise(stream);
  return spsa_estimate_at(oracle, x, params, delta, xi);
}

Estimator make_estimator(std::shared_ptr<const StochasticOracle> oracle, EstimatorKind kind) {
  require(oracle != nullptr, ErrorCode::invalid_argument, "make_estimator: null oracle");
  using Fn = GradientSample (*)(const StochasticOracle&, const Vector&, const SmoothingParams&,
                                RandomStream&);
  Fn fn = nullptr;
  switch (kind) {
    case EstimatorKind::esgs: fn = esgs_estimate; break;
    case EstimatorKind::gaussian: fn = gs_estimate; break;
    case EstimatorKind::spherical: fn = spherical_estimate; break;
    case EstimatorKind::spsa: fn = spsa_estimate; break;
    default:
      fail(ErrorCode::invalid_argument, "make_estimator: " + std::string(to_string(kind)) +
                                            " needs a decision-dependent oracle");
  }
  return [oracle = std::move(oracle), fn](const Vector& x, const SmoothingParams& params,
                                          RandomStream& stream) {
    return fn(*oracle, x, params, stream);
  };
}

MomentEstimate second_moment_probe(const Estimator& make_estimate, const Vector& x,
                                   const SmoothingParams& params, std::uint64_t sample_count,
                                   RandomStream& stream) {
  require(sample_count >= 1, ErrorCode::invalid_argument,
          "second_moment_probe: sample count must be >= 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t j = 0; j < sample_count; ++j) {
    const double sq = make_estimate(x, params, stream).estimate.squaredNorm();
    sum += sq;
    sum_sq += sq * sq;
  }
  const double count = static_cast<double>(sample_count);
  MomentEstimate result;
  result.mean = sum / count;
  if (sample_count > 1) {
    const double var = std::max(0.0, (sum_sq - count * result.mean * result.mean) / (count - 1.0));
    result.standard_error = std::sqrt(var / count);
  }
  return result;
}

}  // namespace esgs
