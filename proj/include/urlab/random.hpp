// Deterministic random source used by environments, models, and planners.
//
// The engine is std::mt19937_64 (bit-stable across platforms by the
// standard); all distributions are generated here rather than with
// std::*_distribution so that simulation traces are byte-identical across
// standard library implementations.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace urlab {

// SplitMix64 finalizer; scrambles nearby seeds into unrelated streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Seed for an independent derived stream (e.g. run #i of an experiment).
  static std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) {
    return base + stream;
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  int uniform_int(int n) {
    if (n <= 0) throw std::domain_error("uniform_int: n must be positive");
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return static_cast<int>(r % un);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn proportionally to the (non-negative) weights.
  int weighted_index(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (total <= 0) throw std::domain_error("weighted_index: no mass");
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace urlab
