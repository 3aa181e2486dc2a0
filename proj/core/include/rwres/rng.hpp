#pragma once

#include <cstdint>
#include <random>

namespace rwres {

/// Mixes a base seed with a stream index (splitmix64 finalizer). Used to
/// derive independent per-run and per-purpose seeds so that results do not
/// depend on execution order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Seeded random stream. All draws are implemented on top of raw 64-bit
/// engine output so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Exp(rate) sample.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rwres
