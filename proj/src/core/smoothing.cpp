#include "smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "error.hpp"
#include "quadrature_rules.hpp"

namespace esgs {

SmoothedFunctionView::SmoothedFunctionView(DeterministicFn f, double eta_value,
                                           std::uint64_t samples)
    : base_f(std::move(f)), eta(eta_value), mc_samples(samples) {
  require(static_cast<bool>(base_f), ErrorCode::invalid_argument, "smoothed view: empty f");
  require(eta > 0.0, ErrorCode::invalid_argument, "smoothed view: eta must be positive");
  require(mc_samples >= 1, ErrorCode::invalid_argument, "smoothed view: need >= 1 sample");
}

McValue smoothed_value(const SmoothedFunctionView& view, const Vector& x, RandomStream& stream) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t s = 0; s < view.mc_samples; ++s) {
    const double value = view.base_f(x + sample_gaussian_vector(x.size(), view.eta, stream));
    sum += value;
    sum_sq += value * value;
  }
  const double count = static_cast<double>(view.mc_samples);
  McValue out;
  out.mean = sum / count;
  if (view.mc_samples > 1) {
    const double var = std::max(0.0, (sum_sq - count * out.mean * out.mean) / (count - 1.0));
    out.standard_error = std::sqrt(var / count);
  }
  return out;
}

McGradient smoothed_gradient_mc(const DeterministicFn& f, const Vector& x, double eta,
                                std::uint64_t samples, RandomStream& stream) {
  require(samples >= 2, ErrorCode::invalid_argument, "smoothed_gradient_mc: need >= 2 samples");
  require(eta > 0.0, ErrorCode::invalid_argument, "smoothed_gradient_mc: eta must be positive");
  const Eigen::Index n = x.size();
  const double scale = 1.0 / (eta * std::sqrt(2.0 * std::numbers::pi));
  Vector sum = Vector::Zero(n), sum_sq = Vector::Zero(n);
  Vector point(n);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double shift = eta * std::sqrt(2.0 * stream.exponential());
    const Vector base = x - sample_gaussian_vector(n, eta, stream);
    point = base;
    for (Eigen::Index i = 0; i < n; ++i) {
      point[i] = x[i] + shift;
      const double up = f(point);
      point[i] = x[i] - shift;
      const double down = f(point);
      point[i] = base[i];
      const double g = scale * (up - down);
      sum[i] += g;
      sum_sq[i] += g * g;
    }
  }
  const double count = static_cast<double>(samples);
  McGradient out;
  out.mean = sum / count;
  out.standard_error.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = std::max(0.0, (sum_sq[i] - count * out.mean[i] * out.mean[i]) / (count - 1.0));
    out.standard_error[i] = std::sqrt(var / count);
  }
  return out;
}

namespace {

std::vector<double> kinks_for(const QuadratureOptions& options, Eigen::Index coordinate) {
  if (coordinate < static_cast<Eigen::Index>(options.kinks.size()))
    return options.kinks[coordinate];
  return {};
}

// int_0^inf D(sqrt(2v)) e^{-v} dv for an odd difference D(w).
template <typename Difference>
double exponential_shift_integral(const Difference& diff, std::vector<double> breaks_w,
                                  int nodes) {
  std::sort(breaks_w.begin(), breaks_w.end());
  breaks_w.erase(std::unique(breaks_w.begin(), breaks_w.end()), breaks_w.end());
  breaks_w.erase(std::remove_if(breaks_w.begin(), breaks_w.end(),
                                [](double w) { return !(w > 0.0); }),
                 breaks_w.end());

  if (breaks_w.empty()) {
    // D(w)/w is smooth for smooth f, so factor out v^{1/2}.
    const auto& rule = quadrature::laguerre(nodes, 0.5);
    double total = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double v = rule.nodes[k];
      total += rule.weights[k] * diff(std::sqrt(2.0 * v)) / std::sqrt(v);
    }
    return total;
  }

  // Finite pieces in w, where dv = w dw and e^{-v} = e^{-w^2/2}.
  const auto& gl = quadrature::legendre(nodes);
  double total = 0.0;
  double lo = 0.0;
  for (const double hi : breaks_w) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double w = mid + half * gl.nodes[k];
      total += half * gl.weights[k] * diff(w) * w * std::exp(-0.5 * w * w);
    }
    lo = hi;
  }
  // Smooth tail past the last kink.
  const double v0 = 0.5 * lo * lo;
  const auto& tail = quadrature::laguerre(nodes, 0.0);
  double tail_sum = 0.0;
  for (std::size_t k = 0; k < tail.nodes.size(); ++k)
    tail_sum += tail.weights[k] * diff(std::sqrt(2.0 * (v0 + tail.nodes[k])));
  return total + std::exp(-v0) * tail_sum;
}

// E[g(s)] for s ~ N(0, 1), split at the given s-breakpoints when present.
template <typename Integrand>
double gaussian_expectation(const Integrand& g, std::vector<double> breaks_s, int nodes) {
  if (breaks_s.empty()) {
    const auto& rule = quadrature::hermite(nodes);
    double total = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) total += rule.weights[k] * g(rule.nodes[k]);
    return total;
  }
  constexpr double kSpan = 12.0;
  breaks_s.push_back(-kSpan);
  breaks_s.push_back(kSpan);
  std::sort(breaks_s.begin(), breaks_s.end());
  breaks_s.erase(std::unique(breaks_s.begin(), breaks_s.end()), breaks_s.end());
  const auto& gl = quadrature::legendre(nodes);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks_s.size(); ++p) {
    const double lo = std::max(breaks_s[p], -kSpan), hi = std::min(breaks_s[p + 1], kSpan);
    if (!(hi > lo)) continue;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double s = mid + half * gl.nodes[k];
      total += half * gl.weights[k] * g(s) * norm * std::exp(-0.5 * s * s);
    }
  }
  return total;
}

Vector quadrature_level(const DeterministicFn& f, const Vector& x, double eta,
                        const QuadratureOptions& options, int nodes) {
  const Eigen::Index n = x.size();
  Vector grad(n);
  const double scale = 1.0 / (eta * std::sqrt(2.0 * std::numbers::pi));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> breaks_w;
    for (const double c : kinks_for(options, i)) breaks_w.push_back(std::abs(c - x[i]) / eta);

    auto component_at = [&](const Vector& base) {
      Vector point = base;
      auto diff = [&](double w) {
        point[i] = x[i] + eta * w;
        const double up = f(point);
        point[i] = x[i] - eta * w;
        return up - f(point);
      };
      return exponential_shift_integral(diff, breaks_w, nodes);
    };

    if (n == 1) {
      grad[i] = scale * component_at(x);
      continue;
    }
    const Eigen::Index j = 1 - i;
    std::vector<double> breaks_s;
    for (const double c : kinks_for(options, j)) breaks_s.push_back((x[j] - c) / eta);
    auto integrand = [&](double s) {
      Vector base = x;
      base[j] = x[j] - eta * s;
      return component_at(base);
    };
    grad[i] = scale * gaussian_expectation(integrand, breaks_s, nodes);
  }
  return grad;
}

}  // namespace

QuadratureGradient smoothed_gradient_quadrature(const DeterministicFn& f, const Vector& x,
                                                double eta, const QuadratureOptions& options) {
  require(x.size() >= 1 && x.size() <= 2, ErrorCode::invalid_argument,
          "smoothed_gradient_quadrature supports n <= 2, got n = " + std::to_string(x.size()));
  require(eta > 0.0, ErrorCode::invalid_argument, "smoothed_gradient_quadrature: eta must be > 0");
  require(static_cast<bool>(f), ErrorCode::invalid_argument, "smoothed_gradient_quadrature: empty f");

  int nodes = options.initial_nodes;
  Vector previous = quadrature_level(f, x, eta, options, nodes);
  while (nodes * 2 <= options.max_nodes) {
    nodes *= 2;
    Vector current = quadrature_level(f, x, eta, options, nodes);
    bool converged = true;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double tol =
          std::max(options.relative_tolerance * std::abs(current[i]), options.absolute_floor);
      if (std::abs(current[i] - previous[i]) > tol) converged = false;
    }
    if (converged) return {current, nodes};
    previous = std::move(current);
  }
  fail(ErrorCode::quadrature, "smoothed_gradient_quadrature did not converge with " +
                                  std::to_string(options.max_nodes) + " nodes per dimension");
}

}  // namespace esgs
