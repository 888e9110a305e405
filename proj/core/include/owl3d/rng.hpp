#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace owl3d {

// 64-bit FNV-1a; stable across platforms, used for stream keys and content
// fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based generator: draw n of stream (seed, key) is a pure function of
// (seed, key, n), so per-scene streams do not depend on processing order.
// Distributions are implemented here rather than with <random> so that draws
// are identical across standard libraries.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream_key);
  CounterRng(std::uint64_t seed, std::uint64_t stream_key);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform in [0, n), rejection sampled (no modulo bias). n must be > 0.
  std::size_t index(std::size_t n);
  // Standard normal via Box-Muller.
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace owl3d
