#pragma once

// Deterministic random streams for scene synthesis.
//
// Generator: xoshiro256** seeded by four successive SplitMix64 outputs.
// Uniform doubles use the top 53 bits, ((x >> 11) + 0.5) * 2^-53, which lies
// strictly inside (0, 1). Standard normals use Acklam's rational
// approximation of the inverse normal CDF (relative error below 1.2e-9)
// applied to one uniform draw. Poisson counts use sequential inversion of the
// CDF with one uniform draw. None of this depends on <random>'s
// implementation-defined distributions, so streams are reproducible across
// standard libraries.

#include <cstdint>

namespace segdecide {

/// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stateless SplitMix64 finalizer, used to derive per-scene seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// Inverse of the standard normal CDF for u in (0, 1).
double inverse_normal_cdf(double u);

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in (0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();
  /// Poisson(mean), mean in [0, 500].
  std::uint32_t poisson(double mean);

 private:
  std::uint64_t s_[4];
};

}  // namespace segdecide
