#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kgl {

/// SplitMix64 finalizer; also the seed-splitting hash.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` under `root`. Every replica, chain and
/// sub-experiment derives its seed this way, so results do not depend on
/// scheduling.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Thin wrapper over mt19937_64 with portable uniform/exponential draws.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform on {0, ..., n-1}; n > 0.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  double normal() {
    // Marsaglia polar method, kept local so streams are identical across
    // standard library implementations.
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Knuth multiplication for small means; libstdc++'s sampler above that.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      double limit = std::exp(-mean);
      double p = uniform();
      std::uint64_t k = 0;
      while (p > limit) {
        p *= uniform();
        ++k;
      }
      return k;
    }
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
  }

  std::mt19937_64 &engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace kgl
