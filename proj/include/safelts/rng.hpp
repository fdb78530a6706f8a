#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace safelts {

// splitmix64 finalizer, used only for deriving stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent stream seed for (base, tag, index). Streams that share the base
// seed but differ in tag or index are decorrelated; the environment streams of
// two policies use the same (tag, index) on purpose, so paired comparisons see
// common random numbers.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                    std::uint64_t index = 0) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ fnv1a64(tag));
  h = mix64(h ^ index);
  return h;
}

// Deterministic random stream. Gaussians come from Box-Muller over mt19937_64
// uniforms; std::normal_distribution is implementation-defined and would break
// reproducibility across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  Eigen::VectorXd normal_vector(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = normal();
    return v;
  }

  // Uniform on the closed d-ball: isotropic direction, radius ~ r * U^(1/d).
  Eigen::VectorXd uniform_in_ball(int d, double radius) {
    Eigen::VectorXd v = normal_vector(d);
    const double n = v.norm();
    if (n == 0.0) return Eigen::VectorXd::Zero(d);
    const double r = radius * std::pow(uniform01(), 1.0 / d);
    return v * (r / n);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

}  // namespace safelts
