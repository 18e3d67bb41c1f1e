#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "optimizer.hpp"
#include "oracle.hpp"

namespace esgs {
namespace {

std::shared_ptr<const StochasticOracle> deterministic(Eigen::Index n,
                                                      std::function<double(const Vector&)> f,
                                                      double lipschitz) {
  return std::make_shared<FunctionOracle>(
      n, [f = std::move(f)](const Vector& x, const Noise&) { return f(x); }, no_noise, lipschitz);
}

TEST(Schedule, NamedExamples) {
  const auto a = Schedule::convex_diminishing(4).values(0);
  EXPECT_DOUBLE_EQ(a.first, 0.5);
  EXPECT_DOUBLE_EQ(a.second, 0.5);
  const auto b = Schedule::strongly_convex(2.0, 1.0).values(4);
  EXPECT_DOUBLE_EQ(b.first, 0.5);
  EXPECT_DOUBLE_EQ(b.second, 0.5);
  const auto c = Schedule::nonconvex_fixed_eta(0.1, 1.0, 1).values(0);
  EXPECT_DOUBLE_EQ(c.first, 0.1);
  EXPECT_DOUBLE_EQ(c.second, 0.1);
}

TEST(Schedule, FormulasAtLaterIndices) {
  const auto d = Schedule::convex_diminishing(3).values(5);
  EXPECT_NEAR(d.first, 1.0 / std::sqrt(18.0), 1e-15);
  const auto k = Schedule::convex_constant(4, 100, 2.0, 5.0);
  EXPECT_NEAR(k.values(0).first, 2.0 / (5.0 * 20.0), 1e-15);
  EXPECT_NEAR(k.values(73).second, 1.0 / 20.0, 1e-15);
  const auto f = Schedule::nonconvex_fixed_eta(0.5, 2.0, 4).values(8);
  EXPECT_NEAR(f.first, 0.5 / (2.0 * 2.0 * 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(f.second, 0.5);
  const auto g = Schedule::nonconvex_asymptotic(0.8, 0.4).values(15);
  EXPECT_NEAR(g.first, std::pow(16.0, -0.8), 1e-15);
  EXPECT_NEAR(g.second, std::pow(16.0, -0.4), 1e-15);
  const auto h = Schedule::custom({2.0, 1.0, 3.0}, {0.5, 0.0, 1.0}).values(1);
  EXPECT_DOUBLE_EQ(h.first, 0.5);
  EXPECT_DOUBLE_EQ(h.second, 0.5);
}

TEST(Schedule, RejectsInvalidParameters) {
  EXPECT_THROW(Schedule::strongly_convex(0.5, 1.0), Error);  // theta mu <= 1
  EXPECT_THROW(Schedule::strongly_convex(2.0, 0.0), Error);
  EXPECT_THROW(Schedule::nonconvex_asymptotic(0.6, 0.5), Error);  // 2 alpha - beta <= 1
  EXPECT_THROW(Schedule::nonconvex_asymptotic(1.0, 0.5), Error);
  EXPECT_THROW(Schedule::nonconvex_fixed_eta(0.0, 1.0, 2), Error);
  EXPECT_THROW(Schedule::convex_constant(2, 0, 1.0, 1.0), Error);
  EXPECT_THROW(Schedule::convex_diminishing(0), Error);
  EXPECT_THROW(Schedule::strongly_convex(2.0, 1.0).values(0), Error);
}

TEST(Schedule, NameRoundTrip) {
  for (auto kind : {ScheduleKind::convex_diminishing, ScheduleKind::convex_constant,
                    ScheduleKind::strongly_convex, ScheduleKind::nonconvex_fixed_eta,
                    ScheduleKind::nonconvex_asymptotic, ScheduleKind::custom})
    EXPECT_EQ(schedule_from_string(to_string(kind)), kind);
  EXPECT_THROW(schedule_from_string("adam"), Error);
}

TEST(Step, Examples) {
  const Vector x{{0.3, -0.2}};
  EXPECT_EQ(step(x, Vector::Zero(2), 0.7, FeasibleSet::cube(2, -1, 1)), x);
  EXPECT_EQ(step(Vector{{1.0, 1.0}}, Vector{{1.0, -1.0}}, 0.5, FeasibleSet()), (Vector{{0.5, 1.5}}));
  EXPECT_EQ(step(Vector{{1.0, 0.0}}, Vector{{-4.0, 0.0}}, 1.0, FeasibleSet::cube(2, -1, 1)),
            (Vector{{1.0, 0.0}}));
  EXPECT_THROW(step(x, Vector::Zero(3), 0.1, FeasibleSet()), Error);
}

TEST(Run, SingleStepMatchesHandComputation) {
  const auto oracle = deterministic(2, [](const Vector& x) { return 3.0 * x[0]; }, 3.0);
  const Estimator est = make_estimator(oracle, EstimatorKind::esgs);
  const Vector x0{{0.2, 0.1}};
  RandomStream s(17), replay(17);
  const Trajectory t = run(est, Schedule::convex_diminishing(2), 1, FeasibleSet(), x0, s);
  const double v = sample_exponential(replay);
  const double gamma = 1.0 / std::sqrt(2.0);
  // Linear F: only the first coordinate moves, by 3 * 2 sqrt(2V) / sqrt(2 pi).
  const double g1 = 3.0 * 2.0 * std::sqrt(2.0 * v) / std::sqrt(2.0 * std::numbers::pi);
  ASSERT_EQ(t.iterates.size(), 2u);
  EXPECT_NEAR(t.final_iterate[0], 0.2 - gamma * g1, 1e-14);
  EXPECT_NEAR(t.final_iterate[1], 0.1, 1e-14);
  EXPECT_EQ(t.oracle_calls_cumulative, (std::vector<std::uint64_t>{0, 4}));
}

TEST(Run, ConstantObjectiveStaysPut) {
  const auto oracle = deterministic(3, [](const Vector&) { return 4.0; }, 0.0);
  RandomStream s(1);
  const Vector x0{{0.1, 0.2, 0.3}};
  const Trajectory t = run(make_estimator(oracle, EstimatorKind::esgs),
                           Schedule::convex_diminishing(3), 20, FeasibleSet(), x0, s);
  for (const Vector& x : t.iterates) EXPECT_EQ(x, x0);
}

TEST(Run, ProjectsStartAndStaysFeasible) {
  const auto oracle = deterministic(4, [](const Vector& x) { return x.lpNorm<1>(); }, 2.0);
  const auto set = FeasibleSet::centered_ball(4, 1.0);
  RandomStream s(2);
  const Trajectory t = run(make_estimator(oracle, EstimatorKind::esgs),
                           Schedule::convex_diminishing(4), 200, set, Vector::Constant(4, 5.0), s);
  for (const Vector& x : t.iterates) EXPECT_TRUE(set.contains(x, 1e-12));
  EXPECT_EQ(t.iterates.size(), 201u);
  EXPECT_EQ(t.gammas.size(), 200u);
  EXPECT_EQ(t.etas.size(), 200u);
}

TEST(Run, DeterministicAndBudgeted) {
  const auto oracle = std::make_shared<FunctionOracle>(
      5, [](const Vector& x, const Noise& xi) { return x.squaredNorm() + xi.dot(x); },
      [](RandomStream& s) { return sample_gaussian_vector(5, 1.0, s); }, 10.0);
  for (auto kind : {EstimatorKind::esgs, EstimatorKind::gaussian, EstimatorKind::spherical,
                    EstimatorKind::spsa}) {
    const Estimator est = make_estimator(oracle, kind);
    RandomStream a(5, 1), b(5, 1);
    const auto sched = Schedule::convex_diminishing(5);
    const Trajectory ta = run(est, sched, 50, FeasibleSet(), Vector::Ones(5), a);
    const Trajectory tb = run(est, sched, 50, FeasibleSet(), Vector::Ones(5), b);
    EXPECT_EQ(ta.iterates, tb.iterates);
    EXPECT_EQ(ta.total_oracle_calls(), 50 * calls_per_estimate(kind, 5));
    for (std::size_t k = 1; k < ta.oracle_calls_cumulative.size(); ++k)
      EXPECT_GE(ta.oracle_calls_cumulative[k], ta.oracle_calls_cumulative[k - 1]);
  }
}

TEST(Run, ObserverSeesEveryIterate) {
  const auto oracle = deterministic(2, [](const Vector& x) { return x.sum(); }, 1.5);
  RandomStream s(3);
  std::vector<std::uint64_t> seen;
  RunOptions options;
  options.record_iterates = false;
  options.observer = [&](std::uint64_t k, const Vector&) { seen.push_back(k); };
  const Trajectory t = run(make_estimator(oracle, EstimatorKind::esgs),
                           Schedule::convex_diminishing(2), 5, FeasibleSet(), Vector::Zero(2), s,
                           options);
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_TRUE(t.iterates.empty());
}

TEST(WeightedAverage, Examples) {
  Trajectory t;
  t.iterates = {Vector{{0.0, 0.0}}, Vector{{2.0, 2.0}}, Vector{{9.0, 9.0}}};
  t.gammas = {0.5, 0.5};
  t.weighted_sum = 0.5 * t.iterates[0] + 0.5 * t.iterates[1];
  t.gamma_sum = 1.0;
  EXPECT_EQ(weighted_average(t), (Vector{{1.0, 1.0}}));

  Trajectory u;
  u.iterates = {Vector{{0.0}}, Vector{{4.0}}, Vector{{7.0}}};
  u.gammas = {1.0, 3.0};
  u.weighted_sum = Vector{{12.0}};
  u.gamma_sum = 4.0;
  EXPECT_DOUBLE_EQ(weighted_average(u)[0], 3.0);
}

TEST(WeightedAverage, MatchesRunRecords) {
  const auto oracle = deterministic(3, [](const Vector& x) { return x.lpNorm<1>(); }, 2.0);
  RandomStream s(4);
  const Trajectory t = run(make_estimator(oracle, EstimatorKind::esgs),
                           Schedule::convex_diminishing(3), 30, FeasibleSet(), Vector::Ones(3), s);
  Vector num = Vector::Zero(3);
  double den = 0.0;
  for (std::size_t k = 0; k < t.gammas.size(); ++k) {
    num += t.gammas[k] * t.iterates[k];
    den += t.gammas[k];
  }
  EXPECT_LT((weighted_average(t) - num / den).norm(), 1e-12);
}

TEST(RandomIterate, Frequencies) {
  RandomStream s(8);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int j = 0; j < draws; ++j) ++counts[sample_random_index({1.0, 1.0, 1.0, 1.0}, s)];
  for (int c : counts) EXPECT_NEAR(c / double(draws), 0.25, 0.01);
  int ones = 0;
  for (int j = 0; j < draws; ++j) ones += sample_random_index({1.0, 3.0}, s) == 1;
  EXPECT_NEAR(ones / double(draws), 0.75, 0.01);
  EXPECT_EQ(sample_random_index({2.0}, s), 0u);
}

TEST(RandomIterate, ReturnsRecordedPoint) {
  Trajectory t;
  t.iterates = {Vector{{1.0}}, Vector{{2.0}}};
  t.gammas = {1.0};
  RandomStream s(9);
  EXPECT_EQ(sample_random_iterate(t, s), Vector{{1.0}});
}

TEST(Run, StronglyConvexRateShape) {
  // f = 0.5 ||x||^2 with additive noise, theta = 3: E ||x_k||^2 ~ c / k.
  const Eigen::Index n = 5;
  const auto oracle = std::make_shared<FunctionOracle>(
      n, [](const Vector& x, const Noise& xi) { return 0.5 * x.squaredNorm() + xi.dot(x); },
      [n](RandomStream& s) { return sample_gaussian_vector(n, 1.0, s); }, 3.0);
  const Estimator est = make_estimator(oracle, EstimatorKind::esgs);
  const std::vector<std::uint64_t> checkpoints{125, 250, 500, 1000, 2000};
  std::vector<double> mean_sq(checkpoints.size(), 0.0);
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    RandomStream s(77, r);
    RunOptions options;
    options.record_iterates = false;
    options.observer = [&](std::uint64_t k, const Vector& x) {
      for (std::size_t c = 0; c < checkpoints.size(); ++c)
        if (checkpoints[c] == k) mean_sq[c] += x.squaredNorm() / reps;
    };
    run(est, Schedule::strongly_convex(3.0, 1.0), 2000, FeasibleSet(), Vector::Constant(n, 2.0), s,
        options);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(checkpoints.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double lx = std::log(double(checkpoints[c])), ly = std::log(mean_sq[c]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  EXPECT_NEAR(slope, -1.0, 0.2);
}

}  // namespace
}  // namespace esgs
