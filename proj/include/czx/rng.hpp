#pragma once

#include <cstdint>
#include <random>

namespace czx {

// Seeded generator used by every Monte Carlo path. Distributions come from the
// standard library, so streams are reproducible for a given toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int bit() { return static_cast<int>(engine_() >> 63); }
  double sign() { return bit() ? -1.0 : 1.0; }
  // Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  std::uint64_t next() { return engine_(); }
  // Independent child stream, for per-trial generators that must not depend
  // on how many draws earlier trials consumed.
  Rng split() { return Rng(engine_()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Stateless mixer; gives reproducible pseudo-random values keyed by indices
// without storing them.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

}  // namespace czx
