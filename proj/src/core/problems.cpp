#include "problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace esgs {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  if (!std::isfinite(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double soft_threshold(double u, double t) {
  if (u > t) return u - t;
  if (u < -t) return u + t;
  return 0.0;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// 0.5 y'Qy + (b + xi)'y + w ||y||_1
class QuadraticL1Oracle final : public StochasticOracle {
 public:
  QuadraticL1Oracle(Eigen::MatrixXd q, Vector b, double w, double lipschitz)
      : q_(std::move(q)), b_(std::move(b)), w_(w), lipschitz_(lipschitz) {}

  Eigen::Index dimension() const override { return b_.size(); }

  double value(const Vector& x, const Noise& xi) const override {
    return 0.5 * x.dot(q_ * x) + (b_ + xi).dot(x) + w_ * x.lpNorm<1>();
  }

  Noise sample_noise(RandomStream& stream) const override {
    return sample_gaussian_vector(b_.size(), 1.0, stream);
  }

  double lipschitz() const override { return lipschitz_; }

  void coordinate_sweep(const Vector& base, const Vector& upper, const Vector& lower,
                        const Noise& xi, Vector& f_upper, Vector& f_lower) const override {
    const Eigen::Index n = b_.size();
    const Vector qy = q_ * base;
    const Vector grad = qy + b_ + xi;
    const double f0 = 0.5 * base.dot(qy) + (b_ + xi).dot(base) + w_ * base.lpNorm<1>();
    f_upper.resize(n);
    f_lower.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto at = [&](double t) {
        const double d = t - base[i];
        return f0 + d * grad[i] + 0.5 * d * d * q_(i, i) +
               w_ * (std::abs(t) - std::abs(base[i]));
      };
      f_upper[i] = at(upper[i]);
      f_lower[i] = at(lower[i]);
    }
  }

 private:
  Eigen::MatrixXd q_;
  Vector b_;
  double w_;
  double lipschitz_;
};

// phi(sum_i (c_i + xi_i) y_i) + mu/2 ||y||^2
class PiecewiseLinearOracle final : public StochasticOracle {
 public:
  PiecewiseLinearOracle(Vector c, std::vector<reference::Line> lines, double mu, double lipschitz)
      : c_(std::move(c)), lines_(std::move(lines)), mu_(mu), lipschitz_(lipschitz) {}

  Eigen::Index dimension() const override { return c_.size(); }

  double value(const Vector& x, const Noise& xi) const override {
    return phi((c_ + xi).dot(x)) + 0.5 * mu_ * x.squaredNorm();
  }

  Noise sample_noise(RandomStream& stream) const override {
    return sample_gaussian_vector(c_.size(), 1.0, stream);
  }

  double lipschitz() const override { return lipschitz_; }

  void coordinate_sweep(const Vector& base, const Vector& upper, const Vector& lower,
                        const Noise& xi, Vector& f_upper, Vector& f_lower) const override {
    const Eigen::Index n = c_.size();
    const Vector weights = c_ + xi;
    const double t0 = weights.dot(base);
    const double sq0 = base.squaredNorm();
    f_upper.resize(n);
    f_lower.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto at = [&](double t) {
        const double d = t - base[i];
        return phi(t0 + weights[i] * d) + 0.5 * mu_ * (sq0 + t * t - base[i] * base[i]);
      };
      f_upper[i] = at(upper[i]);
      f_lower[i] = at(lower[i]);
    }
  }

 private:
  double phi(double t) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& line : lines_) best = std::max(best, line.intercept + line.slope * t);
    return best;
  }

  Vector c_;
  std::vector<reference::Line> lines_;
  double mu_;
  double lipschitz_;
};

// min(sum (y_i - xi)^2, sum (y_i + xi)^2), xi ~ U[0, 2]
class NonconvexMinOracle final : public StochasticOracle {
 public:
  NonconvexMinOracle(Eigen::Index n, double lipschitz) : n_(n), lipschitz_(lipschitz) {}

  Eigen::Index dimension() const override { return n_; }

  double value(const Vector& x, const Noise& xi) const override {
    return combine(x.squaredNorm(), x.sum(), xi[0]);
  }

  Noise sample_noise(RandomStream& stream) const override {
    Noise xi(1);
    xi[0] = 2.0 * stream.uniform();
    return xi;
  }

  double lipschitz() const override { return lipschitz_; }

  void coordinate_sweep(const Vector& base, const Vector& upper, const Vector& lower,
                        const Noise& xi, Vector& f_upper, Vector& f_lower) const override {
    const double sq0 = base.squaredNorm();
    const double sum0 = base.sum();
    f_upper.resize(n_);
    f_lower.resize(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const auto at = [&](double t) {
        return combine(sq0 + t * t - base[i] * base[i], sum0 + t - base[i], xi[0]);
      };
      f_upper[i] = at(upper[i]);
      f_lower[i] = at(lower[i]);
    }
  }

 private:
  double combine(double sq, double sum, double xi) const {
    const double common = sq + static_cast<double>(n_) * xi * xi;
    return std::min(common - 2.0 * xi * sum, common + 2.0 * xi * sum);
  }

  Eigen::Index n_;
  double lipschitz_;
};

// F_hat(x, (zeta1, zeta2)) = -x1 (zeta1 - a1 x1) - x2 (zeta2 - a2 x2)
double market_value(const MarketParams& p, const Vector& x, const Noise& xi) {
  return -x[0] * (xi[0] - p.a1 * x[0]) - x[1] * (xi[1] - p.a2 * x[1]);
}

void check_market_point(const Vector& x, const Noise& xi) {
  require(x.size() == 2, ErrorCode::dimension_mismatch, "market: decision must be 2-dimensional");
  require(xi.size() == 2, ErrorCode::dimension_mismatch, "market: noise must be 2-dimensional");
}

std::vector<Vector> market_corners(const MarketParams& p) {
  std::vector<Vector> corners;
  for (double u : {0.0, p.upper})
    for (double w : {0.0, p.upper}) corners.push_back(Vector{{u, w}});
  return corners;
}

// sqrt(E ||grad_x F_hat||^2) under D(x), maximized over the box corners; the
// integrand is convex in x so the corners attain the maximum.
double market_value_lipschitz(const MarketParams& p) {
  const double half_width_var = (p.r2 - p.l2) * (p.r2 - p.l2) / 12.0;
  const double mid = 0.5 * (p.l2 + p.r2);
  double best = 0.0;
  for (const Vector& x : market_corners(p)) {
    const double d1 = p.a + p.beta * x[0] - 2.0 * p.a1 * x[0];
    const double d2 = mid - 2.0 * p.a2 * x[1];
    best = std::max(best, d1 * d1 + p.sigma2 + d2 * d2 + half_width_var);
  }
  return std::sqrt(best);
}

class MarketKnownDensityOracle final : public KnownDensityOracle {
 public:
  explicit MarketKnownDensityOracle(MarketParams p) : p_(p), sigma_(std::sqrt(p.sigma2)) {
    const double mid = 0.5 * (p.l2 + p.r2);
    const double var2 = (p.r2 - p.l2) * (p.r2 - p.l2) / 12.0;
    double value_bound = 0.0;
    for (const Vector& x : market_corners(p)) {
      const double mean = -x[0] * (p.a + p.beta * x[0] - p.a1 * x[0]) - x[1] * (mid - p.a2 * x[1]);
      value_bound = std::max(value_bound, std::sqrt(mean * mean + x[0] * x[0] * p.sigma2 +
                                                    x[1] * x[1] * var2));
    }
    constants_.ratio_bound_m = std::exp(p.log_ratio_bound);
    constants_.value_bound_mf = value_bound;
    constants_.lip_f_hat = market_value_lipschitz(p);
    constants_.lip_xi = std::abs(p.beta) / sigma_;
  }

  Eigen::Index dimension() const override { return 2; }

  double value(const Vector& x, const Noise& xi) const override {
    check_market_point(x, xi);
    return market_value(p_, x, xi);
  }

  double conditional_density(const Noise& xi, const Vector& x) const override {
    check_market_point(x, xi);
    const double z = (xi[0] - mean1(x)) / sigma_;
    return normal_pdf(z) / sigma_ * uniform_density(xi[1]);
  }

  double reference_density(const Noise& xi) const override {
    return normal_pdf(xi[0] / sigma_) / sigma_ * uniform_density(xi[1]);
  }

  // The uniform factor cancels; the Gaussian ratio is formed in log space.
  double density_ratio(const Noise& xi, const Vector& x) const override {
    check_market_point(x, xi);
    const double m = mean1(x);
    return std::exp((2.0 * xi[0] * m - m * m) / (2.0 * p_.sigma2));
  }

  Noise sample_reference(RandomStream& stream) const override {
    Noise xi(2);
    xi[0] = sigma_ * stream.gaussian();
    xi[1] = p_.l2 + (p_.r2 - p_.l2) * stream.uniform();
    return xi;
  }

  KnownDensityConstants constants() const override { return constants_; }

 private:
  double mean1(const Vector& x) const { return p_.a + p_.beta * x[0]; }
  double uniform_density(double z) const {
    return (z >= p_.l2 && z <= p_.r2) ? 1.0 / (p_.r2 - p_.l2) : 0.0;
  }

  MarketParams p_;
  double sigma_;
  KnownDensityConstants constants_;
};

// zeta1 pair jointly Gaussian with correlation field_correlation(...), zeta2
// shared between the two points (its law does not depend on x).
class MarketRandomFieldOracle final : public RandomFieldOracle {
 public:
  explicit MarketRandomFieldOracle(MarketParams p)
      : p_(p), sigma_(std::sqrt(p.sigma2)), joint_lipschitz_(0.0) {
    // Joint gradient in (x, zeta): the x part as in the value Lipschitz bound
    // plus |d/dzeta| = ||x|| <= upper sqrt(2).
    const double lx = market_value_lipschitz(p);
    joint_lipschitz_ = std::sqrt(lx * lx + 2.0 * p.upper * p.upper);
  }

  Eigen::Index dimension() const override { return 2; }

  double value(const Vector& x, const Noise& xi) const override {
    check_market_point(x, xi);
    return market_value(p_, x, xi);
  }

  std::pair<Noise, Noise> sample_pair(const Vector& x_plus, const Vector& x_minus,
                                      RandomStream& stream) const override {
    require(x_plus.size() == 2 && x_minus.size() == 2, ErrorCode::dimension_mismatch,
            "market: decision must be 2-dimensional");
    const double rho = field_correlation(x_plus[0], x_minus[0], p_.c_xi, p_.beta, sigma_);
    const auto [z_plus, z_minus] = sample_correlated_pair(
        p_.a + p_.beta * x_plus[0], p_.a + p_.beta * x_minus[0], sigma_, rho, stream);
    const double shared = p_.l2 + (p_.r2 - p_.l2) * stream.uniform();
    return {Noise{{z_plus, shared}}, Noise{{z_minus, shared}}};
  }

  double field_constant() const override { return p_.c_xi; }
  double joint_lipschitz() const override { return joint_lipschitz_; }

 private:
  MarketParams p_;
  double sigma_;
  double joint_lipschitz_;
};

struct QuadInstance {
  Eigen::MatrixXd q;
  Vector b;
};

QuadInstance make_quad_instance(Eigen::Index n, std::uint64_t seed) {
  require(n >= 1, ErrorCode::invalid_argument, "quad problem: n must be >= 1");
  RandomStream stream(seed, 0x9d);
  const double dn = static_cast<double>(n);
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) d(i, j) = stream.gaussian();
  Vector b = sample_gaussian_vector(n, 1.0, stream);
  Eigen::MatrixXd bm(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) bm(i, j) = 0.1 * stream.gaussian();
  Eigen::MatrixXd q = d.transpose() * d / dn + Eigen::MatrixXd::Identity(n, n) +
                      bm.transpose() * bm / dn;
  // Symmetrize away rounding asymmetry from the products.
  q = 0.5 * (q + q.transpose()).eval();
  return {std::move(q), std::move(b)};
}

std::pair<double, double> extreme_eigenvalues(const Eigen::MatrixXd& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorCode::oracle, "eigenvalue solver failed");
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

double box_radius(const FeasibleSet& set) {
  if (const auto* box = std::get_if<Box>(&set.variant()))
    return std::max(box->lo.cwiseAbs().maxCoeff(), box->hi.cwiseAbs().maxCoeff());
  return std::numeric_limits<double>::infinity();
}

const std::vector<reference::Line>& piecewise_lines() {
  static const std::vector<reference::Line> lines = {
      {0.9, 0.2}, {0.2, 0.3}, {0.1, 0.6}, {0.5, 0.5}, {0.5, 0.8}};
  return lines;
}

double golden_section_min(const std::function<double(double)>& h, double lo, double hi) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = h(c);
  double fd = h(d);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = h(d);
    }
  }
  double best = 0.5 * (a + b);
  for (double cand : {lo, hi})
    if (h(cand) < h(best)) best = cand;
  return best;
}

}  // namespace

std::string_view to_string(Curvature curvature) {
  switch (curvature) {
    case Curvature::strongly_convex: return "strongly_convex";
    case Curvature::convex: return "convex";
    case Curvature::nonconvex: return "nonconvex";
  }
  return "unknown";
}

Vector default_start(Eigen::Index n, const FeasibleSet& set) {
  Vector x = Vector::Zero(n);
  x.head(std::min<Eigen::Index>(n, 5)).setConstant(5.0);
  return set.project(x);
}

namespace reference {

Vector solve_l1_box_qp_prox(const Eigen::MatrixXd& q, const Vector& b, double w, double lo,
                            double hi) {
  require(lo <= 0.0 && hi >= 0.0, ErrorCode::invalid_argument, "solver: box must contain 0");
  const double step = 1.0 / extreme_eigenvalues(q).second;
  Vector x = Vector::Zero(b.size());
  for (int it = 0; it < 1000000; ++it) {
    const Vector u = x - step * (q * x + b);
    Vector next(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      next[i] = std::clamp(soft_threshold(u[i], step * w), lo, hi);
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    if (change < 1e-15) break;
  }
  return x;
}

Vector solve_l1_box_qp_cd(const Eigen::MatrixXd& q, const Vector& b, double w, double lo,
                          double hi) {
  require(lo <= 0.0 && hi >= 0.0, ErrorCode::invalid_argument, "solver: box must contain 0");
  const Eigen::Index n = b.size();
  Vector x = Vector::Constant(n, hi);
  Vector qx = q * x;
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = b[i] + qx[i] - q(i, i) * x[i];
      const double xi = std::clamp(soft_threshold(-r, w) / q(i, i), lo, hi);
      const double d = xi - x[i];
      if (d != 0.0) {
        qx += d * q.col(i);
        x[i] = xi;
        change = std::max(change, std::abs(d));
      }
    }
    if (change < 1e-15) break;
    if (sweep % 64 == 63) qx = q * x;
  }
  return x;
}

std::vector<EnvelopePiece> upper_envelope(std::vector<Line> lines) {
  require(!lines.empty(), ErrorCode::invalid_argument, "upper_envelope: no lines");
  std::sort(lines.begin(), lines.end(), [](const Line& l, const Line& r) {
    return l.slope < r.slope || (l.slope == r.slope && l.intercept < r.intercept);
  });
  const auto cross = [](const Line& l, const Line& r) {
    return (l.intercept - r.intercept) / (r.slope - l.slope);
  };
  std::vector<Line> hull;
  for (const Line& line : lines) {
    if (!hull.empty() && hull.back().slope == line.slope) hull.pop_back();
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], line) <= cross(hull[hull.size() - 2], hull.back()))
      hull.pop_back();
    hull.push_back(line);
  }
  std::vector<EnvelopePiece> pieces;
  double lo = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const double hi = k + 1 < hull.size() ? cross(hull[k], hull[k + 1])
                                          : std::numeric_limits<double>::infinity();
    pieces.push_back({hull[k].slope, hull[k].intercept, lo, hi});
    lo = hi;
  }
  return pieces;
}

GaussianEnvelopeMoments gaussian_envelope_moments(const std::vector<EnvelopePiece>& pieces,
                                                  double mean, double sd) {
  GaussianEnvelopeMoments out{0.0, 0.0, 0.0};
  if (sd <= 0.0) {
    for (const auto& piece : pieces) {
      if (mean >= piece.lo && mean <= piece.hi) {
        out.value = piece.intercept + piece.slope * mean;
        out.slope_mean = piece.slope;
        return out;
      }
    }
  }
  for (const auto& piece : pieces) {
    const double a = (piece.lo - mean) / sd;
    const double b = (piece.hi - mean) / sd;
    const double mass = normal_cdf(b) - normal_cdf(a);
    const double density_gap = normal_pdf(a) - normal_pdf(b);
    out.value += (piece.intercept + piece.slope * mean) * mass + piece.slope * sd * density_gap;
    out.slope_mean += piece.slope * mass;
    out.slope_score += piece.slope * density_gap;
  }
  return out;
}

}  // namespace reference

BenchmarkProblem quad_l1_problem(const Eigen::MatrixXd& q, const Vector& b, double l1_weight,
                                 const FeasibleSet& set) {
  const Eigen::Index n = b.size();
  require(n >= 1 && q.rows() == n && q.cols() == n, ErrorCode::dimension_mismatch,
          "quad problem: Q must be n x n");
  require(l1_weight >= 0.0, ErrorCode::invalid_argument, "quad problem: l1 weight must be >= 0");
  const auto [lambda_min, lambda_max] = extreme_eigenvalues(q);
  require(lambda_min > 0.0, ErrorCode::invalid_argument, "quad problem: Q must be positive definite");
  const double dn = static_cast<double>(n);
  const double radius = box_radius(set);

  BenchmarkProblem p;
  p.id = l1_weight > 0.0 ? "quad_l1" : "quadratic";
  p.n = n;
  p.set = set;
  p.curvature = Curvature::strongly_convex;
  p.mu = lambda_min;
  p.q_norm = lambda_max;
  // sup ||Qx + b|| on the box, plus the noise and l1 contributions in L2(xi).
  p.lipschitz = lambda_max * radius * std::sqrt(dn) + b.norm() + (1.0 + l1_weight) * std::sqrt(dn);
  p.oracle = std::make_shared<QuadraticL1Oracle>(q, b, l1_weight, p.lipschitz);
  p.exact_f = [q, b, l1_weight](const Vector& x) {
    return 0.5 * x.dot(q * x) + b.dot(x) + l1_weight * x.lpNorm<1>();
  };
  p.gradient = [q, b, l1_weight](const Vector& x) {
    Vector g = q * x + b;
    for (Eigen::Index i = 0; i < x.size(); ++i) g[i] += l1_weight * sign(x[i]);
    return g;
  };
  p.smoothed_gradient = [q, b, l1_weight](const Vector& x, double eta) {
    Vector g = q * x + b;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      g[i] += l1_weight * (2.0 * normal_cdf(x[i] / eta) - 1.0);
    return g;
  };

  const auto* box = std::get_if<Box>(&set.variant());
  Vector x_star;
  if (set.is_unconstrained()) {
    require(l1_weight == 0.0, ErrorCode::invalid_argument,
            "quad problem: the l1 term needs a box feasible set");
    x_star = q.llt().solve(-b);
  } else {
    require(box != nullptr && (box->lo.array() == box->lo[0]).all() &&
                (box->hi.array() == box->hi[0]).all(),
            ErrorCode::invalid_argument, "quad problem: feasible set must be a cube");
    const Vector free = q.llt().solve(-b);
    if (l1_weight == 0.0 && set.contains(free))
      x_star = free;
    else
      x_star = reference::solve_l1_box_qp_prox(q, b, l1_weight, box->lo[0], box->hi[0]);
  }
  p.f_star = p.exact_f(x_star);
  p.x_star = std::move(x_star);
  p.x0 = default_start(n, set);
  return p;
}

BenchmarkProblem quad_l1_problem(Eigen::Index n, std::uint64_t seed) {
  QuadInstance inst = make_quad_instance(n, seed);
  return quad_l1_problem(inst.q, inst.b, 0.5, FeasibleSet::cube(n, -1.0, 1.0));
}

BenchmarkProblem quadratic_problem(Eigen::Index n, std::uint64_t seed) {
  QuadInstance inst = make_quad_instance(n, seed);
  return quad_l1_problem(inst.q, inst.b, 0.0, FeasibleSet::cube(n, -10.0, 10.0));
}

BenchmarkProblem piecewise_linear_problem(Eigen::Index n, double mu) {
  require(n >= 1, ErrorCode::invalid_argument, "piecewise problem: n must be >= 1");
  require(mu >= 0.0 && std::isfinite(mu), ErrorCode::invalid_argument,
          "piecewise problem: mu must be >= 0");
  const double dn = static_cast<double>(n);
  Vector c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = static_cast<double>(i + 1) / dn;
  const auto pieces = reference::upper_envelope(piecewise_lines());
  double max_slope = 0.0;
  for (const auto& line : piecewise_lines()) max_slope = std::max(max_slope, std::abs(line.slope));

  BenchmarkProblem p;
  p.id = "piecewise_linear";
  p.n = n;
  p.set = FeasibleSet::centered_ball(n, 1.0);
  p.curvature = mu > 0.0 ? Curvature::strongly_convex : Curvature::convex;
  p.mu = mu;
  // ||grad F|| <= max|s| ||c + xi|| + mu ||x||, in L2(xi) on the unit ball.
  p.lipschitz = max_slope * std::sqrt(c.squaredNorm() + dn) + mu;
  p.oracle = std::make_shared<PiecewiseLinearOracle>(c, piecewise_lines(), mu, p.lipschitz);
  p.exact_f = [c, pieces, mu](const Vector& x) {
    return reference::gaussian_envelope_moments(pieces, c.dot(x), x.norm()).value +
           0.5 * mu * x.squaredNorm();
  };
  p.gradient = [c, pieces, mu](const Vector& x) {
    const double sd = x.norm();
    const auto m = reference::gaussian_envelope_moments(pieces, c.dot(x), sd);
    Vector g = m.slope_mean * c + mu * x;
    if (sd > 0.0) g += (m.slope_score / sd) * x;
    return g;
  };

  // phi is nondecreasing, so for fixed ||x|| = r the objective is smallest
  // along -c; the remaining 1-D convex problem is solved by golden section.
  const double c_norm = c.norm();
  const auto along = [&](double r) {
    return reference::gaussian_envelope_moments(pieces, -r * c_norm, r).value + 0.5 * mu * r * r;
  };
  const double r_star = golden_section_min(along, 0.0, 1.0);
  p.x_star = Vector(-r_star * c / c_norm);
  p.f_star = p.exact_f(*p.x_star);
  p.x0 = default_start(n, p.set);
  return p;
}

BenchmarkProblem nonconvex_min_problem(Eigen::Index n) {
  require(n >= 1, ErrorCode::invalid_argument, "nonconvex problem: n must be >= 1");
  const double dn = static_cast<double>(n);

  BenchmarkProblem p;
  p.id = "nonconvex";
  p.n = n;
  p.set = FeasibleSet::cube(n, -10.0, 10.0);
  p.curvature = Curvature::nonconvex;
  // ||grad_x F|| = 2 ||x -/+ xi 1|| <= 2 (10 + 2) sqrt(n) on the box.
  p.lipschitz = 24.0 * std::sqrt(dn);
  p.oracle = std::make_shared<NonconvexMinOracle>(n, p.lipschitz);
  p.exact_f = [dn](const Vector& x) {
    return x.squaredNorm() + 4.0 * dn / 3.0 - 2.0 * std::abs(x.sum());
  };
  p.gradient = [dn](const Vector& x) {
    const double s = x.sum();
    if (s != 0.0) return Vector(2.0 * x.array() - 2.0 * sign(s));
    // Kink: min over v in [-2, 2] of ||2x + v 1||, attained at the clamped mean.
    const double v = std::clamp(-2.0 * s / dn, -2.0, 2.0);
    return Vector(2.0 * x.array() + v);
  };
  p.smoothed_gradient = [dn](const Vector& x, double eta) {
    const double t = x.sum() / (eta * std::sqrt(dn));
    return Vector(2.0 * x.array() - 2.0 * (2.0 * normal_cdf(t) - 1.0));
  };
  p.f_star = dn / 3.0;
  p.x_star = Vector(Vector::Ones(n));
  p.x0 = default_start(n, p.set);
  return p;
}

BenchmarkProblem market_problem(const MarketParams& params) {
  require(params.a1 - params.beta > 0.0, ErrorCode::invalid_argument,
          "market problem: requires a1 - beta > 0");
  require(params.a2 > 0.0, ErrorCode::invalid_argument, "market problem: requires a2 > 0");
  require(params.sigma2 > 0.0, ErrorCode::invalid_argument, "market problem: sigma2 must be > 0");
  require(params.r2 > params.l2, ErrorCode::invalid_argument, "market problem: requires r2 > l2");
  require(params.upper > 0.0, ErrorCode::invalid_argument, "market problem: box must be nonempty");
  require(params.log_ratio_bound > 0.0, ErrorCode::invalid_argument,
          "market problem: ln M must be positive");
  require(params.c_xi >= params.beta * params.beta, ErrorCode::invalid_argument,
          "market problem: c_xi must be >= beta^2");
  const MarketParams m = params;
  const double mid = 0.5 * (m.l2 + m.r2);

  BenchmarkProblem p;
  p.id = "market";
  p.n = 2;
  p.set = FeasibleSet::cube(2, 0.0, m.upper);
  p.curvature = Curvature::strongly_convex;
  p.mu = 2.0 * std::min(m.a1 - m.beta, m.a2);
  p.known_density = std::make_shared<MarketKnownDensityOracle>(m);
  p.random_field = std::make_shared<MarketRandomFieldOracle>(m);
  p.exact_f = [m, mid](const Vector& x) {
    return -x[0] * (m.a + m.beta * x[0] - m.a1 * x[0]) - x[1] * (mid - m.a2 * x[1]);
  };
  p.gradient = [m, mid](const Vector& x) {
    return Vector{{2.0 * (m.a1 - m.beta) * x[0] - m.a, 2.0 * m.a2 * x[1] - mid}};
  };
  // grad f is affine, so on the box its norm peaks at a corner.
  for (const Vector& corner : market_corners(m))
    p.lipschitz = std::max(p.lipschitz, p.gradient(corner).norm());
  const double x2 = mid / (2.0 * m.a2);
  p.x_star = Vector{{m.a / (2.0 * (m.a1 - m.beta)), x2}};
  p.x_stable = Vector{{m.a / (2.0 * m.a1 - m.beta), x2}};
  p.f_star = p.exact_f(*p.x_star);
  p.x0 = default_start(2, p.set);
  return p;
}

BenchmarkProblem linear_problem(Eigen::Index n, double lipschitz) {
  require(n >= 1, ErrorCode::invalid_argument, "linear problem: n must be >= 1");
  require(lipschitz > 0.0 && std::isfinite(lipschitz), ErrorCode::invalid_argument,
          "linear problem: L0 must be positive");
  BenchmarkProblem p;
  p.id = "linear";
  p.n = n;
  p.set = FeasibleSet::centered_ball(n, 1.0);
  p.curvature = Curvature::convex;
  p.lipschitz = lipschitz;
  p.oracle = std::make_shared<FunctionOracle>(
      n, [lipschitz](const Vector& x, const Noise&) { return lipschitz * x[0]; }, nullptr,
      lipschitz);
  p.exact_f = [lipschitz](const Vector& x) { return lipschitz * x[0]; };
  p.gradient = [lipschitz, n](const Vector&) {
    Vector g = Vector::Zero(n);
    g[0] = lipschitz;
    return g;
  };
  p.smoothed_gradient = [p_grad = p.gradient](const Vector& x, double) { return p_grad(x); };
  Vector x_star = Vector::Zero(n);
  x_star[0] = -1.0;
  p.x_star = x_star;
  p.f_star = -lipschitz;
  p.x0 = default_start(n, p.set);
  return p;
}

double performative_gap(const BenchmarkProblem& problem) {
  require(problem.x_star.has_value() && problem.x_stable.has_value(),
          ErrorCode::invalid_argument, "performative_gap: problem has no stable point");
  return (*problem.x_star - *problem.x_stable).norm();
}

double error_metric(const BenchmarkProblem& problem, const Vector& x) {
  require(x.size() == problem.n, ErrorCode::dimension_mismatch, "error_metric: wrong dimension");
  if (problem.curvature == Curvature::nonconvex) return problem.gradient(x).squaredNorm();
  return problem.exact_f(x) - problem.f_star;
}

Estimator make_estimator(const BenchmarkProblem& problem, EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::dd_known:
      require(problem.known_density != nullptr, ErrorCode::invalid_argument,
              "problem '" + problem.id + "' has no known-density oracle");
      return make_estimator(problem.known_density);
    case EstimatorKind::dd_unknown:
      require(problem.random_field != nullptr, ErrorCode::invalid_argument,
              "problem '" + problem.id + "' has no random-field oracle");
      return make_estimator(problem.random_field);
    default:
      require(problem.oracle != nullptr, ErrorCode::invalid_argument,
              "problem '" + problem.id + "' needs a decision-dependent estimator");
      return make_estimator(problem.oracle, kind);
  }
}

}  // namespace esgs
