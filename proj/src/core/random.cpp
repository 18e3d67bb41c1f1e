#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace esgs {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t substream)
    : seed_(seed), substream_(substream) {}

void RandomStream::refill() {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32(counter, key);
  ++block_;
  used_ = 0;
}

std::uint32_t RandomStream::next_u32() {
  if (used_ == 4) refill();
  return buffer_[used_++];
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RandomStream::uniform() {
  // (k + 0.5) / 2^53 never hits either endpoint.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RandomStream::rademacher() { return (next_u32() & 1u) ? 1.0 : -1.0; }

std::uint64_t RandomStream::below(std::uint64_t bound) {
  require(bound > 0, ErrorCode::invalid_argument, "below: bound must be positive");
  // Lemire-style rejection on the 64-bit draw.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % bound;
}

double sample_exponential(RandomStream& stream) { return stream.exponential(); }

Vector sample_gaussian_vector(Eigen::Index n, double sigma, RandomStream& stream) {
  require(n >= 1, ErrorCode::invalid_argument, "sample_gaussian_vector: n must be >= 1");
  require(sigma >= 0.0, ErrorCode::invalid_argument, "sample_gaussian_vector: sigma must be >= 0");
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = sigma * stream.gaussian();
  return z;
}

Vector sample_unit_sphere(Eigen::Index n, RandomStream& stream) {
  Vector u = sample_gaussian_vector(n, 1.0, stream);
  double norm = u.norm();
  while (norm == 0.0) {
    u = sample_gaussian_vector(n, 1.0, stream);
    norm = u.norm();
  }
  return u / norm;
}

std::pair<double, double> sample_correlated_pair(double mean1, double mean2, double sigma,
                                                 double rho, RandomStream& stream) {
  require(rho >= -1.0 && rho <= 1.0, ErrorCode::invalid_argument,
          "sample_correlated_pair: rho must lie in [-1, 1], got " + std::to_string(rho));
  require(sigma >= 0.0, ErrorCode::invalid_argument, "sample_correlated_pair: sigma must be >= 0");
  const double g1 = stream.gaussian();
  const double g2 = stream.gaussian();
  const double e1 = g1;
  const double e2 = rho * g1 + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * g2;
  return {mean1 + sigma * e1, mean2 + sigma * e2};
}

}  // namespace esgs
