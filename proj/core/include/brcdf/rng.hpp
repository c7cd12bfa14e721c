#pragma once

#include <cstdint>
#include <string_view>

#include "brcdf/types.hpp"

namespace brcdf {

/// Deterministic random stream built on SplitMix64. Streams are keyed by
/// (master_seed, index, tag) so that independent Monte-Carlo runs and noise
/// sources never share a sequence and results reproduce bit-identically on
/// any platform. Gaussian variates come from the Box-Muller transform; the
/// second variate of each pair is cached.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream keyed(std::uint64_t master_seed, std::uint64_t index, std::string_view tag);

  std::uint64_t next_u64();
  /// Uniform draw in the open interval (0, 1).
  double uniform01();
  /// Standard normal draw.
  double gaussian();
  Vector gaussian_vector(Eigen::Index n);

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace brcdf
