#pragma once

#include <cstdint>
#include <optional>

namespace mbfpca {

/// Counter-based generator: the i-th output is splitmix64(seed + i * golden).
/// Bit-identical on every platform, unlike the std distributions.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal via the Box-Muller transform.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

}  // namespace mbfpca
