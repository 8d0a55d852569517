#pragma once

#include <cstdint>
#include <random>

namespace l1sc {

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions are implemented here rather than taken from
/// <random>, because the standard leaves those implementation-defined:
///   - uniform01: top 53 bits of one draw, scaled by 2^-53, in [0, 1);
///   - normal: Marsaglia polar method, spare value cached;
///   - index(n): rejection sampling on the top bits, unbiased.
/// Identical seeds therefore give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for stream `stream` of master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace l1sc
