#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "random.hpp"

namespace esgs {

using DeterministicFn = std::function<double(const Vector&)>;

/// f_eta(x) = E[f(x + eta Z)], Z ~ N(0, I), evaluated by Monte Carlo.
struct SmoothedFunctionView {
  DeterministicFn base_f;
  double eta;
  std::uint64_t mc_samples;

  SmoothedFunctionView(DeterministicFn f, double eta_value, std::uint64_t samples);
};

struct McValue {
  double mean = 0.0;
  double standard_error = 0.0;
};

McValue smoothed_value(const SmoothedFunctionView& view, const Vector& x, RandomStream& stream);

struct McGradient {
  Vector mean;
  Vector standard_error;
};

/// Monte-Carlo mean of the esGs estimate of a deterministic f; an unbiased
/// estimate of grad f_eta usable in any dimension.
McGradient smoothed_gradient_mc(const DeterministicFn& f, const Vector& x, double eta,
                                std::uint64_t samples, RandomStream& stream);

struct QuadratureOptions {
  /// Per coordinate: values t at which f is nonsmooth along that axis
  /// (e.g. {{0.0}} for |x|). The integration is split at their preimages.
  std::vector<std::vector<double>> kinks;
  double relative_tolerance = 1e-6;
  double absolute_floor = 1e-9;
  int initial_nodes = 8;
  int max_nodes = 256;
};

struct QuadratureGradient {
  Vector gradient;
  int nodes = 0;  // node count per dimension at convergence
};

// Deterministic grad f_eta for n <= 2 from the exponential-shift integral
// representation: Gauss-Laguerre in v and Gauss-Hermite in the remaining
// coordinate, doubled until successive levels agree.
QuadratureGradient smoothed_gradient_quadrature(const DeterministicFn& f, const Vector& x,
                                                double eta, const QuadratureOptions& options = {});

}  // namespace esgs
