#include "brcdf/rng.hpp"

#include <cmath>
#include <numbers>

namespace brcdf {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream RngStream::keyed(std::uint64_t master_seed, std::uint64_t index, std::string_view tag) {
  std::uint64_t s = master_seed;
  const std::uint64_t a = splitmix64(s);
  s ^= fnv1a(tag);
  const std::uint64_t b = splitmix64(s);
  s ^= index * 0x2545f4914f6cdd1dULL + a;
  const std::uint64_t c = splitmix64(s);
  return RngStream(b ^ (c + a));
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform01() {
  // 53-bit mantissa nudged off zero: values lie strictly inside (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u = uniform01();
  const double v = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

Vector RngStream::gaussian_vector(Eigen::Index n) {
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = gaussian();
  return out;
}

}  // namespace brcdf
