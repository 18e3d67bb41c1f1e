#include "projections.hpp"

#include <limits>
#include <sstream>

#include "error.hpp"

namespace esgs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dimension(Eigen::Index expected, Eigen::Index got) {
  require(expected == got, ErrorCode::dimension_mismatch,
          "projection: set has dimension " + std::to_string(expected) + ", point has " +
              std::to_string(got));
}

}  // namespace

FeasibleSet FeasibleSet::unconstrained() { return FeasibleSet(Unconstrained{}); }

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
  require(lo.size() == hi.size(), ErrorCode::dimension_mismatch, "box: lo/hi size mismatch");
  require((lo.array() <= hi.array()).all(), ErrorCode::invalid_argument,
          "box: lo must be <= hi componentwise");
  return FeasibleSet(Box{std::move(lo), std::move(hi)});
}

FeasibleSet FeasibleSet::cube(Eigen::Index n, double lo, double hi) {
  return box(Vector::Constant(n, lo), Vector::Constant(n, hi));
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  require(radius > 0.0, ErrorCode::invalid_argument, "ball: radius must be positive");
  return FeasibleSet(Ball{std::move(center), radius});
}

FeasibleSet FeasibleSet::centered_ball(Eigen::Index n, double radius) {
  return ball(Vector::Zero(n), radius);
}

Vector FeasibleSet::project(const Vector& u) const {
  return std::visit(
      overloaded{
          [&](const Unconstrained&) -> Vector { return u; },
          [&](const Box& b) -> Vector {
            check_dimension(b.lo.size(), u.size());
            return u.cwiseMax(b.lo).cwiseMin(b.hi);
          },
          [&](const Ball& b) -> Vector {
            check_dimension(b.center.size(), u.size());
            const Vector offset = u - b.center;
            const double dist = offset.norm();
            // Points already on the sphere up to rounding stay put, so
            // projection is exactly idempotent.
            if (dist <= b.radius * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return u;
            return b.center + offset * (b.radius / dist);
          },
      },
      set_);
}

bool FeasibleSet::contains(const Vector& x, double tolerance) const {
  return std::visit(
      overloaded{
          [&](const Unconstrained&) { return true; },
          [&](const Box& b) {
            check_dimension(b.lo.size(), x.size());
            return ((x - b.lo).array() >= -tolerance).all() &&
                   ((b.hi - x).array() >= -tolerance).all();
          },
          [&](const Ball& b) {
            check_dimension(b.center.size(), x.size());
            return (x - b.center).norm() <= b.radius + tolerance;
          },
      },
      set_);
}

std::string FeasibleSet::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const Unconstrained&) { out << "unconstrained"; },
                 [&](const Box& b) { out << "box(n=" << b.lo.size() << ")"; },
                 [&](const Ball& b) { out << "ball(n=" << b.center.size() << ", r=" << b.radius << ")"; },
             },
             set_);
  return out.str();
}

}  // namespace esgs
