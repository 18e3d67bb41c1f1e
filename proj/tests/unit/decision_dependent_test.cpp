#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "decision_dependent.hpp"
#include "error.hpp"
#include "problems.hpp"

namespace esgs {
namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// F_hat = x xi with xi ~ N(x, 1) and reference N(0, 1); f(x) = x^2.
class ToyKnownOracle final : public KnownDensityOracle {
 public:
  explicit ToyKnownOracle(double log_m) : log_m_(log_m) {}
  Eigen::Index dimension() const override { return 1; }
  double value(const Vector& x, const Noise& xi) const override { return x[0] * xi[0]; }
  double conditional_density(const Noise& xi, const Vector& x) const override {
    return normal_pdf(xi[0] - x[0]);
  }
  double reference_density(const Noise& xi) const override { return normal_pdf(xi[0]); }
  Noise sample_reference(RandomStream& stream) const override {
    return Noise::Constant(1, stream.gaussian());
  }
  KnownDensityConstants constants() const override {
    return {std::exp(log_m_), 10.0, 10.0, 1.0};
  }

 private:
  double log_m_;
};

class ConstantKnownOracle final : public KnownDensityOracle {
 public:
  Eigen::Index dimension() const override { return 3; }
  double value(const Vector&, const Noise&) const override { return 2.5; }
  double conditional_density(const Noise& xi, const Vector&) const override {
    return normal_pdf(xi[0]);
  }
  double reference_density(const Noise& xi) const override { return normal_pdf(xi[0]); }
  Noise sample_reference(RandomStream& stream) const override {
    return Noise::Constant(1, stream.gaussian());
  }
  KnownDensityConstants constants() const override { return {1.0, 2.5, 1.0, 1.0}; }
};

// xi_x = x_1 + W with one W shared by both points of a pair (rho = 1).
class SharedFieldOracle final : public RandomFieldOracle {
 public:
  Eigen::Index dimension() const override { return 2; }
  double value(const Vector& x, const Noise& xi) const override {
    return std::abs(x[0] - xi[0]) + x[1] * x[1];
  }
  std::pair<Noise, Noise> sample_pair(const Vector& x_plus, const Vector& x_minus,
                                      RandomStream& stream) const override {
    const double w = stream.gaussian();
    return {Noise::Constant(1, 0.5 * x_plus[0] + w), Noise::Constant(1, 0.5 * x_minus[0] + w)};
  }
  double field_constant() const override { return 0.25; }
  double joint_lipschitz() const override { return 5.0; }
};

TEST(KlSymNormal, Examples) {
  EXPECT_EQ(kl_sym_normal(1.3, 1.3, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(kl_sym_normal(1.0, 0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(kl_sym_normal(0.7, -0.4, 2.0), kl_sym_normal(0.7, -0.4, 1.0) / 4.0);
  EXPECT_DOUBLE_EQ(kl_sym_normal(0.7, -0.4, 1.5), kl_sym_normal(-0.4, 0.7, 1.5));
  EXPECT_DOUBLE_EQ(kl_sym_normal(2.0, 0.0, 1.0), 4.0 * kl_sym_normal(1.0, 0.0, 1.0));
  EXPECT_THROW(kl_sym_normal(0.0, 1.0, 0.0), Error);
}

TEST(KlSymNormal, MarketMeansScaleWithBeta) {
  // Means a + beta x: the divergence is beta^2 (x - y)^2 / sigma^2.
  const double a = 4.5, beta = 0.1, sigma = std::sqrt(10.0);
  EXPECT_NEAR(kl_sym_normal(a + beta * 3.0, a + beta * 1.0, sigma), beta * beta * 4.0 / 10.0, 1e-15);
}

TEST(FieldCorrelation, Examples) {
  EXPECT_EQ(field_correlation(1.2, 1.2, 1.0, 0.1, 3.0), 1.0);
  EXPECT_NEAR(field_correlation(std::sqrt(2.0), 0.0, 1.0, 0.1, std::sqrt(10.0)), 0.901, 1e-12);
  EXPECT_EQ(field_correlation(1000.0, 0.0, 1.0, 0.1, 1.0), -1.0);
  EXPECT_THROW(field_correlation(1.0, 0.0, 0.001, 0.1, 1.0), Error);
  EXPECT_THROW(field_correlation(1.0, 0.0, 1.0, 0.1, 0.0), Error);
}

TEST(EsgsDdKnown, ConstantGivesZero) {
  ConstantKnownOracle oracle;
  RandomStream s(1);
  const auto g = esgs_dd_known(oracle, Vector{{0.1, 0.2, 0.3}}, SmoothingParams(0.5), s);
  EXPECT_EQ(g.estimate, Vector::Zero(3));
  EXPECT_EQ(g.oracle_calls, 6u);
}

TEST(EsgsDdKnown, MarketRatioAtZeroNoise) {
  const BenchmarkProblem market = market_problem();
  const MarketParams p;
  const Vector x{{2.0, 1.0}};
  const double m = p.a + p.beta * x[0];
  EXPECT_NEAR(market.known_density->density_ratio(Noise{{0.0, 1.0}}, x),
              std::exp(-m * m / (2.0 * p.sigma2)), 1e-15);
  // The log-space override agrees with the density quotient.
  const Noise xi{{3.1, 1.4}};
  EXPECT_NEAR(market.known_density->density_ratio(xi, x),
              market.known_density->conditional_density(xi, x) /
                  market.known_density->reference_density(xi),
              1e-12);
}

TEST(EsgsDdKnown, RatioBoundViolationReportsNoise) {
  ToyKnownOracle oracle(std::log(1.5));
  try {
    esgs_dd_known_at(oracle, Vector{{1.0}}, SmoothingParams(0.1), 0.5, Vector{{0.0}},
                     Noise{{5.0}});
    FAIL() << "expected a ratio-bound error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ratio_bound);
    EXPECT_NE(std::string(e.what()).find("xi = (5)"), std::string::npos) << e.what();
  }
}

TEST(EsgsDdKnown, ToyIsUnbiased) {
  const auto oracle = std::make_shared<ToyKnownOracle>(40.0);
  const Estimator estimator = make_estimator(oracle);
  const double eta = 0.2;
  for (double x : {-0.5, 0.3, 0.8}) {
    RandomStream s(42, static_cast<std::uint64_t>((x + 1.0) * 10));
    const int samples = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int j = 0; j < samples; ++j) {
      const double g = estimator(Vector{{x}}, SmoothingParams(eta), s).estimate[0];
      sum += g;
      sum_sq += g * g;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum_sq / samples - mean * mean) / (samples - 1));
    // f_eta(x) = E[(x + eta Z)^2]; its derivative by central difference.
    const auto f_eta = [eta](double t) { return t * t + eta * eta; };
    const double h = 1e-4;
    const double target = (f_eta(x + h) - f_eta(x - h)) / (2 * h);
    EXPECT_NEAR(mean, target, 4 * se) << "x = " << x;
  }
}

TEST(EsgsDdKnown, DrawOrderIsNoiseThenVThenZ) {
  ToyKnownOracle oracle(40.0);
  RandomStream a(9), b(9);
  const auto g = esgs_dd_known(oracle, Vector{{0.4}}, SmoothingParams(0.3), a);
  const Noise xi = Noise::Constant(1, b.gaussian());
  const double v = sample_exponential(b);
  const Vector z = sample_gaussian_vector(1, 0.3, b);
  const auto h = esgs_dd_known_at(oracle, Vector{{0.4}}, SmoothingParams(0.3), v, z, xi);
  EXPECT_EQ(g.estimate, h.estimate);
  EXPECT_EQ(g.v, v);
}

TEST(EsgsDdUnknown, PerfectCorrelationReducesToEsgs) {
  SharedFieldOracle oracle;
  const Vector x{{0.3, -0.6}};
  const double eta = 0.4;
  RandomStream s(3), t(3);
  const auto g = esgs_dd_unknown(oracle, x, SmoothingParams(eta), s);
  // Replay: (V, Z) first, then one W per coordinate.
  const double v = sample_exponential(t);
  const Vector z = sample_gaussian_vector(2, eta, t);
  const double shift = eta * std::sqrt(2.0 * v);
  const double scale = 1.0 / (eta * std::sqrt(2.0 * std::numbers::pi));
  for (int i = 0; i < 2; ++i) {
    const double w = t.gaussian();
    Vector plus = x - z, minus = x - z;
    plus[i] = x[i] + shift;
    minus[i] = x[i] - shift;
    const double expected =
        scale * (oracle.value(plus, Noise::Constant(1, 0.5 * plus[0] + w)) -
                 oracle.value(minus, Noise::Constant(1, 0.5 * minus[0] + w)));
    EXPECT_DOUBLE_EQ(g.estimate[i], expected);
  }
  EXPECT_EQ(g.oracle_calls, 4u);
}

TEST(EsgsDdUnknown, MarketFieldIsLipschitz) {
  const MarketParams p;
  const BenchmarkProblem market = market_problem(p);
  RandomStream s(11);
  for (double gap : {0.05, 0.5, 2.0}) {
    const Vector xp{{3.0 + gap, 2.0}}, xm{{3.0, 2.0}};
    double sum = 0.0, mean_plus = 0.0;
    const int samples = 200000;
    for (int j = 0; j < samples; ++j) {
      const auto [a, b] = market.random_field->sample_pair(xp, xm, s);
      sum += (a - b).squaredNorm();
      mean_plus += a[0];
    }
    EXPECT_LE(sum / samples, p.c_xi * gap * gap * 1.1) << gap;
    // The marginal of the first draw depends only on x_plus.
    EXPECT_NEAR(mean_plus / samples, p.a + p.beta * xp[0], 4 * std::sqrt(p.sigma2 / samples));
  }
}

TEST(DecisionDependent, MarketMeansMatchGradient) {
  const BenchmarkProblem market = market_problem();
  const Vector x{{2.5, 3.0}};
  const double eta = 0.3;
  const Vector grad = market.gradient(x);  // f is quadratic, so grad f_eta = grad f
  for (bool known : {true, false}) {
    const Estimator estimator =
        known ? make_estimator(market.known_density) : make_estimator(market.random_field);
    RandomStream s(21, known ? 1 : 2);
    const int samples = 100000;
    Vector sum = Vector::Zero(2), sum_sq = Vector::Zero(2);
    for (int j = 0; j < samples; ++j) {
      const Vector g = estimator(x, SmoothingParams(eta), s).estimate;
      sum += g;
      sum_sq += g.cwiseProduct(g);
    }
    const Vector mean = sum / samples;
    for (int i = 0; i < 2; ++i) {
      const double se = std::sqrt((sum_sq[i] / samples - mean[i] * mean[i]) / (samples - 1));
      EXPECT_NEAR(mean[i], grad[i], 4 * se) << (known ? "known " : "field ") << i;
    }
  }
}

TEST(DecisionDependent, SecondMomentWithinBound) {
  const BenchmarkProblem market = market_problem();
  const double n = 2.0;
  const Vector x{{2.5, 3.0}};
  RandomStream s(31);
  const auto field = second_moment_probe(make_estimator(market.random_field), x,
                                         SmoothingParams(0.2), 20000, s);
  const double l_field = market.random_field->lipschitz();
  EXPECT_LE(field.mean / n, (4.0 / std::numbers::pi) * l_field * l_field * 1.1);
  const auto known = second_moment_probe(make_estimator(market.known_density), x,
                                         SmoothingParams(0.2), 20000, s);
  const double l_known = market.known_density->constants().lipschitz();
  EXPECT_LE(known.mean / n, (4.0 / std::numbers::pi) * l_known * l_known * 1.1);
}

}  // namespace
}  // namespace esgs
