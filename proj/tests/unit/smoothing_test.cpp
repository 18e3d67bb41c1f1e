#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "smoothing.hpp"

namespace esgs {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

TEST(SmoothedValue, LinearIsUnchanged) {
  const DeterministicFn f = [](const Vector& x) { return 2.0 * x[0] - x[1]; };
  RandomStream s(1);
  const Vector x{{0.3, -1.0}};
  const auto v = smoothed_value(SmoothedFunctionView(f, 0.7, 20000), x, s);
  EXPECT_NEAR(v.mean, f(x), 3 * v.standard_error);
}

TEST(SmoothedValue, SquaredNormGainsNEtaSquared) {
  const DeterministicFn f = [](const Vector& x) { return x.squaredNorm(); };
  RandomStream s(2);
  const Vector x{{0.3, -1.0}};
  const auto v = smoothed_value(SmoothedFunctionView(f, 0.5, 50000), x, s);
  EXPECT_NEAR(v.mean, f(x) + 0.5, 3 * v.standard_error);
}

TEST(SmoothedValue, ConvexBracket) {
  // f = ||x||_1 is convex and sqrt(n)-Lipschitz.
  const DeterministicFn f = [](const Vector& x) { return x.lpNorm<1>(); };
  const Eigen::Index n = 3;
  const double l0 = std::sqrt(3.0), eta = 0.2;
  RandomStream s(3);
  const Vector x{{0.1, -0.4, 0.0}};
  const auto v = smoothed_value(SmoothedFunctionView(f, eta, 20000), x, s);
  EXPECT_GE(v.mean, f(x) - 3 * v.standard_error);
  EXPECT_LE(v.mean, f(x) + l0 * std::sqrt(n + 1.0) * eta + 3 * v.standard_error);
}

TEST(SmoothedValue, LipschitzTransfer) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]) + std::abs(x[1]); };
  const double l0 = std::sqrt(2.0);
  RandomStream sx(4), sy(4);  // common random numbers
  const SmoothedFunctionView view(f, 0.3, 20000);
  const Vector x{{0.2, 0.1}}, y{{-0.3, 0.5}};
  const auto vx = smoothed_value(view, x, sx);
  const auto vy = smoothed_value(view, y, sy);
  EXPECT_LE(std::abs(vx.mean - vy.mean),
            l0 * (x - y).norm() + 3 * (vx.standard_error + vy.standard_error));
}

TEST(SmoothedValue, RejectsBadView) {
  const DeterministicFn f = [](const Vector& x) { return x[0]; };
  EXPECT_THROW(SmoothedFunctionView(f, 0.0, 10), Error);
  EXPECT_THROW(SmoothedFunctionView(f, 0.1, 0), Error);
}

TEST(Quadrature, LinearGradientIsExact) {
  const DeterministicFn f = [](const Vector& x) { return 1.5 * x[0] - 0.25 * x[1]; };
  const auto q = smoothed_gradient_quadrature(f, Vector{{0.3, 2.0}}, 0.4);
  EXPECT_NEAR(q.gradient[0], 1.5, 1e-6);
  EXPECT_NEAR(q.gradient[1], -0.25, 1e-6);
}

TEST(Quadrature, AbsoluteValueAtZeroIsZero) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]); };
  QuadratureOptions options;
  options.kinks = {{0.0}};
  for (double eta : {0.05, 0.2, 1.0})
    EXPECT_NEAR(smoothed_gradient_quadrature(f, Vector{{0.0}}, eta, options).gradient[0], 0.0, 1e-9);
}

TEST(Quadrature, AbsoluteValueMatchesClosedForm) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]); };
  QuadratureOptions options;
  options.kinks = {{0.0}};
  double previous = -1.0;
  for (double x : {-0.5, -0.1, 0.0, 0.15, 0.3, 0.6}) {
    const double g = smoothed_gradient_quadrature(f, Vector{{x}}, 0.2, options).gradient[0];
    EXPECT_NEAR(g, 2.0 * normal_cdf(x / 0.2) - 1.0, 1e-6) << x;
    EXPECT_GT(g, previous);
    previous = g;
  }
  const double at = smoothed_gradient_quadrature(f, Vector{{0.3}}, 0.2, options).gradient[0];
  EXPECT_GT(at, 0.0);
  EXPECT_LT(at, 1.0);
  EXPECT_NEAR(at, 0.8663855974622838, 1e-4);
}

TEST(Quadrature, MissingKinkHintIsReportedOrLoose) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]); };
  try {
    smoothed_gradient_quadrature(f, Vector{{0.3}}, 0.2);
    FAIL() << "expected non-convergence without the kink";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::quadrature);
  }
  QuadratureOptions loose;
  loose.relative_tolerance = 1e-2;
  const double g = smoothed_gradient_quadrature(f, Vector{{0.3}}, 0.2, loose).gradient[0];
  EXPECT_NEAR(g, 2.0 * normal_cdf(1.5) - 1.0, 2e-2);
}

TEST(Quadrature, TwoDimensionalMixedFunction) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]) + x[1] * x[1]; };
  QuadratureOptions options;
  options.kinks = {{0.0}, {}};
  const auto q = smoothed_gradient_quadrature(f, Vector{{0.4, -0.2}}, 0.3, options);
  EXPECT_NEAR(q.gradient[0], 2.0 * normal_cdf(0.4 / 0.3) - 1.0, 1e-6);
  EXPECT_NEAR(q.gradient[1], -0.4, 1e-6);
}

TEST(Quadrature, KinkInTheOtherCoordinate) {
  // d/dx1 of E[x1 |x2 + eta z2|] is E|x2 + eta z2| = the folded-normal mean.
  const DeterministicFn f = [](const Vector& x) { return x[0] * std::abs(x[1]); };
  QuadratureOptions options;
  options.kinks = {{}, {0.0}};
  const double eta = 0.5, x2 = 0.2;
  const auto q = smoothed_gradient_quadrature(f, Vector{{1.0, x2}}, eta, options);
  const double folded = eta * std::sqrt(2.0 / std::numbers::pi) * std::exp(-x2 * x2 / (2 * eta * eta)) +
                        x2 * (1.0 - 2.0 * normal_cdf(-x2 / eta));
  EXPECT_NEAR(q.gradient[0], folded, 1e-6);
}

TEST(Quadrature, RejectsHighDimension) {
  const DeterministicFn f = [](const Vector& x) { return x.sum(); };
  EXPECT_THROW(smoothed_gradient_quadrature(f, Vector::Zero(3), 0.1), Error);
}

TEST(Quadrature, GradientSmoothnessProbe) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]) + std::abs(x[1]); };
  QuadratureOptions options;
  options.kinks = {{0.0}, {0.0}};
  const double eta = 0.25, l0 = std::sqrt(2.0);
  const double bound = 2.0 * l0 * std::sqrt(2.0) / (eta * std::sqrt(2.0 * std::numbers::pi));
  RandomStream s(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = sample_gaussian_vector(2, 0.5, s);
    const Vector y = sample_gaussian_vector(2, 0.5, s);
    const Vector gx = smoothed_gradient_quadrature(f, x, eta, options).gradient;
    const Vector gy = smoothed_gradient_quadrature(f, y, eta, options).gradient;
    EXPECT_LE((gx - gy).norm(), bound * (x - y).norm() * 1.05);
  }
}

TEST(SmoothedGradientMc, AgreesWithQuadrature) {
  const DeterministicFn f = [](const Vector& x) { return std::abs(x[0]) + x[1] * x[1]; };
  QuadratureOptions options;
  options.kinks = {{0.0}, {}};
  const Vector x{{0.1, 0.3}};
  RandomStream s(6);
  const auto mc = smoothed_gradient_mc(f, x, 0.3, 100000, s);
  const auto q = smoothed_gradient_quadrature(f, x, 0.3, options);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(mc.mean[i], q.gradient[i], 4 * mc.standard_error[i]);
}

}  // namespace
}  // namespace esgs
