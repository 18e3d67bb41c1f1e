#pragma once

#include <memory>
#include <utility>

#include "estimators.hpp"
#include "oracle.hpp"
#include "random.hpp"

namespace esgs {

/// Constants of the known-density setting: the ratio bound M, the value bound
/// M_f, the L2 Lipschitz constant of F_hat and the KL-Lipschitz constant L_xi.
struct KnownDensityConstants {
  double ratio_bound_m = 0.0;
  double value_bound_mf = 0.0;
  double lip_f_hat = 0.0;
  double lip_xi = 0.0;

  /// Lipschitz constant of f = E_{p(.|x)} F_hat: M * L_f_hat + M_f * L_xi.
  double lipschitz() const { return ratio_bound_m * lip_f_hat + value_bound_mf * lip_xi; }
};

// Decision-dependent oracle whose conditional density p(xi | x) is known.
// Samples come from a fixed reference density p_tilde and are reweighted.
class KnownDensityOracle {
 public:
  virtual ~KnownDensityOracle() = default;

  virtual Eigen::Index dimension() const = 0;
  /// F_hat(x, xi)
  virtual double value(const Vector& x, const Noise& xi) const = 0;
  virtual double conditional_density(const Noise& xi, const Vector& x) const = 0;
  virtual double reference_density(const Noise& xi) const = 0;
  virtual Noise sample_reference(RandomStream& stream) const = 0;
  virtual KnownDensityConstants constants() const = 0;

  /// p(xi | x) / p_tilde(xi); override when a log-space form is more stable.
  virtual double density_ratio(const Noise& xi, const Vector& x) const;
};

// Decision-dependent oracle driven by a random field {xi_x}: only correlated
// draws at pairs of query points are available, never the density.
class RandomFieldOracle {
 public:
  virtual ~RandomFieldOracle() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double value(const Vector& x, const Noise& xi) const = 0;
  /// (xi_1, xi_2) with marginals D(x_plus), D(x_minus).
  virtual std::pair<Noise, Noise> sample_pair(const Vector& x_plus, const Vector& x_minus,
                                              RandomStream& stream) const = 0;
  /// c_xi with E||xi_x - xi_y||^2 <= c_xi ||x - y||^2.
  virtual double field_constant() const = 0;
  /// Joint Lipschitz constant L_xi of F_hat in (x, xi).
  virtual double joint_lipschitz() const = 0;

  /// L0 = L_xi sqrt(2 + 2 c_xi).
  double lipschitz() const;
};

/// Importance-reweighted esGs at realized (v, z, xi). Throws ratio_bound if
/// any evaluated ratio exceeds M.
GradientSample esgs_dd_known_at(const KnownDensityOracle& oracle, const Vector& x,
                                const SmoothingParams& params, double v, const Vector& z,
                                const Noise& xi);
/// Draws xi ~ p_tilde, then V ~ Exp(1), then Z ~ N(0, eta^2 I).
GradientSample esgs_dd_known(const KnownDensityOracle& oracle, const Vector& x,
                             const SmoothingParams& params, RandomStream& stream);

/// Random-field esGs: one (V, Z) per estimate, a fresh field pair per coordinate.
GradientSample esgs_dd_unknown(const RandomFieldOracle& oracle, const Vector& x,
                               const SmoothingParams& params, RandomStream& stream);

Estimator make_estimator(std::shared_ptr<const KnownDensityOracle> oracle);
Estimator make_estimator(std::shared_ptr<const RandomFieldOracle> oracle);

/// Symmetric KL divergence between N(mean_x, sigma^2) and N(mean_y, sigma^2).
double kl_sym_normal(double mean_x, double mean_y, double sigma);

/// Correlation for the Gaussian market field:
/// max(1 - (c_xi - beta^2) (x_plus - x_minus)^2 / (2 sigma^2), -1).
double field_correlation(double x_plus, double x_minus, double c_xi, double beta, double sigma);

}  // namespace esgs
