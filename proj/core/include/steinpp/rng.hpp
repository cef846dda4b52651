#ifndef STEINPP_RNG_HPP
#define STEINPP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "steinpp/errors.hpp"

namespace steinpp {

/// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a counter.
/// Replication k of an experiment uses derive_seed(master, k); the mapping is
/// pure, so any replication can be reproduced in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  return mix64(mix64(master) ^ mix64(counter * 0x9e3779b97f4a7c15ULL + 1));
}

/// Deterministic random stream: mersenne engine plus the handful of scalar
/// samplers the simulators need. All samplers are hand-rolled on top of raw
/// 64-bit draws so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * kInv53; }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in {0, ..., n-1}.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_index: n must be positive");
    // Rejection from the top of the range keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Exponential with the given rate.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential: rate must be positive");
    return -std::log1p(-uniform()) / rate;
  }

  /// Poisson count with the given mean. Product method; means above 60 are
  /// split in half recursively to avoid exp underflow.
  int poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) throw DomainError("poisson: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean > 60.0) return poisson(mean * 0.5) + poisson(mean * 0.5);
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  std::mt19937_64 engine_;
};

}  // namespace steinpp

#endif
