#include "oracle.hpp"

#include <utility>

#include "error.hpp"

namespace esgs {

void StochasticOracle::coordinate_sweep(const Vector& base, const Vector& upper,
                                        const Vector& lower, const Noise& xi, Vector& f_upper,
                                        Vector& f_lower) const {
  const Eigen::Index n = base.size();
  f_upper.resize(n);
  f_lower.resize(n);
  Vector point = base;
  for (Eigen::Index i = 0; i < n; ++i) {
    point[i] = upper[i];
    f_upper[i] = value(point, xi);
    point[i] = lower[i];
    f_lower[i] = value(point, xi);
    point[i] = base[i];
  }
}

FunctionOracle::FunctionOracle(Eigen::Index n, ValueFn value, NoiseFn noise, double lipschitz)
    : n_(n), value_(std::move(value)), noise_(std::move(noise)), lipschitz_(lipschitz) {
  require(n >= 1, ErrorCode::invalid_argument, "FunctionOracle: dimension must be >= 1");
  require(static_cast<bool>(value_), ErrorCode::invalid_argument,
          "FunctionOracle: value function is empty");
  if (!noise_) noise_ = no_noise;
}

Noise no_noise(RandomStream&) { return Noise(); }

CountingOracle::CountingOracle(std::shared_ptr<const StochasticOracle> inner)
    : inner_(std::move(inner)) {
  require(inner_ != nullptr, ErrorCode::invalid_argument, "CountingOracle: null oracle");
}

double CountingOracle::value(const Vector& x, const Noise& xi) const {
  ++calls_;
  return inner_->value(x, xi);
}

void CountingOracle::coordinate_sweep(const Vector& base, const Vector& upper,
                                      const Vector& lower, const Noise& xi, Vector& f_upper,
                                      Vector& f_lower) const {
  calls_ += 2 * static_cast<std::uint64_t>(base.size());
  inner_->coordinate_sweep(base, upper, lower, xi, f_upper, f_lower);
}

}  // namespace esgs
