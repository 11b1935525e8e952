#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace arisim {

// Seeded random stream with cheap derivation of statistically independent
// substreams. Substreams let Monte Carlo trials run in any order (or in
// parallel) while producing identical results: trial i always consumes
// substream(i) regardless of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : root_(seed), engine_(mix(seed)) {}

  // Independent stream addressed by index; derivation is a one-way mix of
  // (root, index) so neighboring indices do not correlate.
  RngStream substream(std::uint64_t index) const {
    return RngStream(mix(root_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
  }

  // CN(0,1): unit-variance circularly symmetric complex Gaussian.
  std::complex<double> cgauss() {
    static const double inv_sqrt2 = 0.7071067811865475244;
    return {normal() * inv_sqrt2, normal() * inv_sqrt2};
  }

  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t root_;
  std::mt19937_64 engine_;
};

}  // namespace arisim
