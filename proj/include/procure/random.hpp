#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace procure {

/// Seeded 64-bit stream. Owned by one consumer at a time; parallel work derives
/// its own substream from (master seed, index) instead of sharing one.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform();

  /// Uniform integer in [0, bound). Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound);

  void fill_uniform(std::span<double> out);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace procure
