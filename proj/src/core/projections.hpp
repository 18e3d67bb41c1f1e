#pragma once

#include <string>
#include <variant>

#include "random.hpp"

namespace esgs {

struct Unconstrained {};

struct Box {
  Vector lo;
  Vector hi;
};

struct Ball {
  Vector center;
  double radius;
};

// Feasible set X. Only the variants used by the benchmark suite exist.
class FeasibleSet {
 public:
  FeasibleSet() = default;  // unconstrained

  static FeasibleSet unconstrained();
  static FeasibleSet box(Vector lo, Vector hi);
  /// [lo, hi]^n
  static FeasibleSet cube(Eigen::Index n, double lo, double hi);
  static FeasibleSet ball(Vector center, double radius);
  /// Ball of the given radius around the origin.
  static FeasibleSet centered_ball(Eigen::Index n, double radius);

  bool is_unconstrained() const { return std::holds_alternative<Unconstrained>(set_); }
  const std::variant<Unconstrained, Box, Ball>& variant() const { return set_; }

  Vector project(const Vector& u) const;
  bool contains(const Vector& x, double tolerance = 1e-12) const;
  std::string describe() const;

 private:
  explicit FeasibleSet(std::variant<Unconstrained, Box, Ball> set) : set_(std::move(set)) {}

  std::variant<Unconstrained, Box, Ball> set_;
};

inline Vector project(const FeasibleSet& set, const Vector& u) { return set.project(u); }

}  // namespace esgs
