#pragma once

// Reproducible random streams. Every task draws from its own engine seeded by
// derive_seed(seed, stream, index), so results never depend on which worker
// ran the task or in which order.

#include <cstdint>
#include <random>

namespace stf {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `stream`, task `index`, derived from a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// Named stream identifiers, so unrelated consumers never share draws.
enum class Stream : std::uint64_t { Series = 1, Walk = 2, Sas = 3, Test = 4 };

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index) : engine_(derive_seed(seed, static_cast<std::uint64_t>(stream), index)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits. Hand-rolled because the standard
  /// distributions are not bit-reproducible across library implementations.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  /// Standard exponential.
  double exponential();
  /// +1 or -1 with equal probability.
  int sign() { return (next() >> 63) ? 1 : -1; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace stf
