#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include <Eigen/Core>

namespace esgs {

using Vector = Eigen::VectorXd;

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A seedable stream of variates. The 64-bit seed is the Philox key and the
// substream id occupies the upper half of the 128-bit counter, so every
// (seed, substream) pair owns a disjoint block sequence of length 2^64.
// Streams are single-owner; copy one to fork an identical sequence.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t substream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Unit-rate exponential by inversion.
  double exponential();
  /// Standard normal (Box-Muller, second value cached).
  double gaussian();
  /// +1 or -1 with equal probability.
  double rademacher();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double sample_exponential(RandomStream& stream);

/// n i.i.d. N(0, sigma^2) coordinates.
Vector sample_gaussian_vector(Eigen::Index n, double sigma, RandomStream& stream);

/// Uniform direction on the unit sphere in R^n.
Vector sample_unit_sphere(Eigen::Index n, RandomStream& stream);

/// Jointly Gaussian pair with the given means, common standard deviation and
/// correlation rho, built from the Cholesky factor of the 2x2 covariance.
std::pair<double, double> sample_correlated_pair(double mean1, double mean2, double sigma,
                                                 double rho, RandomStream& stream);

}  // namespace esgs
