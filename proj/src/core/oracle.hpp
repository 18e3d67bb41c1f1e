#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

#include <Eigen/Core>

#include "random.hpp"

namespace esgs {

/// One noise realization. Problems interpret the coordinates themselves.
using Noise = Eigen::VectorXd;

// Noisy zeroth-order oracle F(x, xi). value() must be deterministic given
// (x, xi) and safe to call from several threads at once.
class StochasticOracle {
 public:
  virtual ~StochasticOracle() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double value(const Vector& x, const Noise& xi) const = 0;
  virtual Noise sample_noise(RandomStream& stream) const = 0;
  /// L0 in the L2(xi) sense.
  virtual double lipschitz() const = 0;

  /// Evaluates F at the 2n points (upper_i, base^{-i}) and (lower_i, base^{-i})
  /// for i = 0..n-1, all at the same xi. Counts as 2n oracle calls. Problems
  /// with cheap rank-one updates override this; the default loops value().
  virtual void coordinate_sweep(const Vector& base, const Vector& upper, const Vector& lower,
                                const Noise& xi, Vector& f_upper, Vector& f_lower) const;
};

/// Wraps plain callables, mostly for tests and the C callback problem.
class FunctionOracle final : public StochasticOracle {
 public:
  using ValueFn = std::function<double(const Vector&, const Noise&)>;
  using NoiseFn = std::function<Noise(RandomStream&)>;

  FunctionOracle(Eigen::Index n, ValueFn value, NoiseFn noise, double lipschitz);

  Eigen::Index dimension() const override { return n_; }
  double value(const Vector& x, const Noise& xi) const override { return value_(x, xi); }
  Noise sample_noise(RandomStream& stream) const override { return noise_(stream); }
  double lipschitz() const override { return lipschitz_; }

 private:
  Eigen::Index n_;
  ValueFn value_;
  NoiseFn noise_;
  double lipschitz_;
};

/// Noise sampler that returns an empty realization (deterministic F).
Noise no_noise(RandomStream& stream);

// Counts point evaluations of the wrapped oracle. Sweeps are forwarded to the
// wrapped oracle's own fast path and counted as 2n.
class CountingOracle final : public StochasticOracle {
 public:
  explicit CountingOracle(std::shared_ptr<const StochasticOracle> inner);

  Eigen::Index dimension() const override { return inner_->dimension(); }
  double value(const Vector& x, const Noise& xi) const override;
  Noise sample_noise(RandomStream& stream) const override { return inner_->sample_noise(stream); }
  double lipschitz() const override { return inner_->lipschitz(); }
  void coordinate_sweep(const Vector& base, const Vector& upper, const Vector& lower,
                        const Noise& xi, Vector& f_upper, Vector& f_lower) const override;

  std::uint64_t calls() const { return calls_.load(); }
  void reset() { calls_ = 0; }

 private:
  std::shared_ptr<const StochasticOracle> inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace esgs
