#include "quadrature_rules.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace esgs::quadrature {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix and
// weights are mu0 times the squared first eigenvector components.
Rule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  require(solver.info() == Eigen::Success, ErrorCode::quadrature,
          "Golub-Welsch eigensolve failed");
  Rule rule;
  const Eigen::Index n = diag.size();
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()[k];
    const double head = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * head * head;
  }
  return rule;
}

Rule build_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

Rule build_laguerre(int n, double alpha) {
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k * (k + alpha));
  return golub_welsch(diag, off, std::tgamma(alpha + 1.0));
}

Rule build_hermite(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  return golub_welsch(diag, off, 1.0);
}

std::mutex cache_mutex;

template <typename Key, typename Build>
const Rule& cached(std::map<Key, std::unique_ptr<Rule>>& cache, const Key& key, Build build) {
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<Rule>(build());
  return *slot;
}

}  // namespace

const Rule& legendre(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "legendre: n must be >= 1");
  static std::map<int, std::unique_ptr<Rule>> cache;
  return cached(cache, n, [n] { return build_legendre(n); });
}

const Rule& laguerre(int n, double alpha) {
  require(n >= 1 && alpha > -1.0, ErrorCode::invalid_argument, "laguerre: bad parameters");
  static std::map<std::tuple<int, double>, std::unique_ptr<Rule>> cache;
  return cached(cache, std::tuple{n, alpha}, [n, alpha] { return build_laguerre(n, alpha); });
}

const Rule& hermite(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "hermite: n must be >= 1");
  static std::map<int, std::unique_ptr<Rule>> cache;
  return cached(cache, n, [n] { return build_hermite(n); });
}

}  // namespace esgs::quadrature
