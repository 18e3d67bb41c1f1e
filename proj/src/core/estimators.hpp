#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "oracle.hpp"
#include "random.hpp"

namespace esgs {

struct SmoothingParams {
  double eta;

  explicit SmoothingParams(double eta_value);
};

/// One realized estimate together with the variates that produced it. For
/// estimators without an exponential shift `v` is 0; `z` holds whatever
/// perturbation direction the estimator drew.
struct GradientSample {
  Vector estimate;
  double v = 0.0;
  Vector z;
  std::uint64_t oracle_calls = 0;
};

enum class EstimatorKind { esgs, gaussian, spherical, spsa, dd_known, dd_unknown };

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

/// Two-point estimators cost 2 oracle calls per estimate; coordinate-wise ones cost 2n.
std::uint64_t calls_per_estimate(EstimatorKind kind, Eigen::Index n);

// Exponentially-shifted Gaussian smoothing. Component i differences F at
// (x_i +/- eta*sqrt(2v), x^{-i} - z^{-i}) with one shared (v, z, xi) for all
// components, scaled by 1/(eta*sqrt(2*pi)). z is the N(0, eta^2 I) draw.
GradientSample esgs_estimate_at(const StochasticOracle& oracle, const Vector& x,
                                const SmoothingParams& params, double v, const Vector& z,
                                const Noise& xi);
/// Draws V ~ Exp(1), then Z ~ N(0, eta^2 I), then xi, in that order.
GradientSample esgs_estimate(const StochasticOracle& oracle, const Vector& x,
                             const SmoothingParams& params, RandomStream& stream);

/// ((F(x + eta z) - F(x)) / eta) z with z standard normal.
GradientSample gs_estimate_at(const StochasticOracle& oracle, const Vector& x,
                              const SmoothingParams& params, const Vector& z, const Noise& xi);
GradientSample gs_estimate(const StochasticOracle& oracle, const Vector& x,
                           const SmoothingParams& params, RandomStream& stream);

/// (n / (2 eta)) (F(x + eta u) - F(x - eta u)) u with u on the unit sphere.
GradientSample spherical_estimate_at(const StochasticOracle& oracle, const Vector& x,
                                     const SmoothingParams& params, const Vector& u,
                                     const Noise& xi);
GradientSample spherical_estimate(const StochasticOracle& oracle, const Vector& x,
                                  const SmoothingParams& params, RandomStream& stream);

/// g_i = (F(x + eta d) - F(x - eta d)) / (2 eta d_i) with Rademacher d.
GradientSample spsa_estimate_at(const StochasticOracle& oracle, const Vector& x,
                                const SmoothingParams& params, const Vector& delta,
                                const Noise& xi);
GradientSample spsa_estimate(const StochasticOracle& oracle, const Vector& x,
                             const SmoothingParams& params, RandomStream& stream);

/// Estimator as a value: (x, eta, stream) -> sample.
using Estimator =
    std::function<GradientSample(const Vector&, const SmoothingParams&, RandomStream&)>;

Estimator make_estimator(std::shared_ptr<const StochasticOracle> oracle, EstimatorKind kind);

/// (1/N) sum_j ||g_j||^2 over N independent estimates, with its standard error.
struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

MomentEstimate second_moment_probe(const Estimator& make_estimate, const Vector& x,
                                   const SmoothingParams& params, std::uint64_t sample_count,
                                   RandomStream& stream);

}  // namespace esgs
