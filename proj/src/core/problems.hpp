#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decision_dependent.hpp"
#include "estimators.hpp"
#include "oracle.hpp"
#include "projections.hpp"
#include "smoothing.hpp"

namespace esgs {

enum class Curvature { strongly_convex, convex, nonconvex };

std::string_view to_string(Curvature curvature);

using GradientFn = std::function<Vector(const Vector&)>;

struct BenchmarkProblem {
  std::string id;
  Eigen::Index n = 0;
  /// Decision-independent oracle; null for the market problem.
  std::shared_ptr<const StochasticOracle> oracle;
  /// Decision-dependent oracles; set only for the market problem.
  std::shared_ptr<const KnownDensityOracle> known_density;
  std::shared_ptr<const RandomFieldOracle> random_field;

  DeterministicFn exact_f;
  /// grad f, or the min-norm subgradient where f is not differentiable.
  GradientFn gradient;
  /// Closed-form grad f_eta where available.
  std::function<Vector(const Vector&, double)> smoothed_gradient;

  double f_star = 0.0;
  std::optional<Vector> x_star;
  /// Performatively stable point (market problem).
  std::optional<Vector> x_stable;
  FeasibleSet set;
  double lipschitz = 0.0;
  Curvature curvature = Curvature::convex;
  double mu = 0.0;
  Vector x0;
  /// Operator 2-norm of the realized quadratic term (quadratic problems).
  std::optional<double> q_norm;
};

/// Start point (5, 5, 5, 5, 5, 0, ..., 0) projected onto the set.
Vector default_start(Eigen::Index n, const FeasibleSet& set);

/// 0.5 x'Qx + (b + xi)'x + 0.5 ||x||_1 on [-1, 1]^n, Q = Q0 + W with
/// Q0 = D'D/n + I and W = B'B/n, D standard normal, B entries N(0, 0.01).
BenchmarkProblem quad_l1_problem(Eigen::Index n, std::uint64_t seed);

/// Same instance without the l1 term on the box [-10, 10]^n; x* = -Q^{-1} b
/// and mu = lambda_min(Q).
BenchmarkProblem quadratic_problem(Eigen::Index n, std::uint64_t seed);

/// Explicit-data variant used by tests: 0.5 x'Qx + (b + xi)'x + w ||x||_1.
BenchmarkProblem quad_l1_problem(const Eigen::MatrixXd& q, const Vector& b, double l1_weight,
                                 const FeasibleSet& set);

/// phi(sum_i (i/n + xi_i) x_i) + mu/2 ||x||^2 on the unit ball with
/// phi(t) = max_j (v_j + s_j t).
BenchmarkProblem piecewise_linear_problem(Eigen::Index n, double mu);

/// ||x||^2 + 4n/3 - 2|sum x| on [-10, 10]^n from F = min(sum (x_i - xi)^2, sum (x_i + xi)^2).
BenchmarkProblem nonconvex_min_problem(Eigen::Index n);

struct MarketParams {
  double a = 4.5;
  double a1 = 0.8;
  double a2 = 0.2;
  double beta = 0.1;
  double sigma2 = 10.0;
  double l2 = 0.5;
  double r2 = 2.2;
  /// Decision box [0, upper]^2.
  double upper = 10.0;
  /// ln M for the known-density ratio bound.
  double log_ratio_bound = 15.0;
  /// Random-field constant c_xi, must be >= beta^2.
  double c_xi = 1.0;
};

BenchmarkProblem market_problem(const MarketParams& params = {});

/// F = L0 x_1 (noise-free) on the unit ball; the tight case of the moment bounds.
BenchmarkProblem linear_problem(Eigen::Index n, double lipschitz);

/// ||x_star - x_stable||
double performative_gap(const BenchmarkProblem& problem);

/// f(x) - f_star for convex tags, ||grad f(x)||^2 for nonconvex.
double error_metric(const BenchmarkProblem& problem, const Vector& x);

/// Estimator bound to the problem's oracle of the right kind.
Estimator make_estimator(const BenchmarkProblem& problem, EstimatorKind kind);

namespace reference {

/// min 0.5 x'Qx + b'x + w ||x||_1 over [lo, hi]^n (lo <= 0 <= hi) by proximal gradient.
Vector solve_l1_box_qp_prox(const Eigen::MatrixXd& q, const Vector& b, double w, double lo,
                            double hi);
/// Same problem by cyclic coordinate descent.
Vector solve_l1_box_qp_cd(const Eigen::MatrixXd& q, const Vector& b, double w, double lo,
                          double hi);

struct Line {
  double slope;
  double intercept;
};
struct EnvelopePiece {
  double slope;
  double intercept;
  double lo;  // -inf for the first piece
  double hi;  // +inf for the last piece
};
/// Upper envelope of the lines, ordered left to right.
std::vector<EnvelopePiece> upper_envelope(std::vector<Line> lines);

/// E[phi(T)] and E[phi'(T)], E[phi'(T) (T - m) / s] for T ~ N(m, s^2).
struct GaussianEnvelopeMoments {
  double value;
  double slope_mean;
  double slope_score;
};
GaussianEnvelopeMoments gaussian_envelope_moments(const std::vector<EnvelopePiece>& pieces,
                                                  double mean, double sd);

}  // namespace reference

}  // namespace esgs
