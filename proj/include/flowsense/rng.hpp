#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace flowsense {

// SplitMix64 finalizer, used to derive well-spread stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic RNG stream keyed by a master seed plus a key path,
/// e.g. RngStream(seed, {kAttack, type_id, trial}). Streams with
/// different key paths are independent, so concurrent tasks can each
/// own one without any ordering dependence.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master,
                     std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t k : keys) s = mix64(s ^ mix64(k));
    engine_.seed(s);
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double gaussian(double mean, double stddev) {
    std::normal_distribution<double> dist(mean, stddev);
    return dist(engine_);
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flowsense
