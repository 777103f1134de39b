#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vmfb {

/// Seeded 64-bit generator with a fully specified output stream.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// Uniform doubles take the top 53 bits of one draw; Gaussians use the
/// Box-Muller transform on two uniforms (cosine branch first, sine branch
/// cached). Integer ranges use rejection on the raw 64-bit draw. None of the
/// implementation-defined std:: distributions are involved, so a given seed
/// reproduces the same stream on any conforming platform.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+u53+box-muller/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream) pairs, via splitmix64 mixing.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gaussian();
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace vmfb
