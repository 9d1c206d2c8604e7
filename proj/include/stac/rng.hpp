#pragma once

#include <cstdint>
#include <random>

namespace stac {

// Conventional stream ids, one per purpose, so independent draw sequences
// never share a stream even when they share a seed.
namespace stream_id {
inline constexpr std::uint64_t kMdpGen = 0;
inline constexpr std::uint64_t kActor = 1;
inline constexpr std::uint64_t kCritic = 2;
inline constexpr std::uint64_t kVerification = 3;
}  // namespace stream_id

/// Deterministic random stream addressed by (seed, stream_id).
///
/// Each logical sequence of draws owns exactly one stream, which makes runs
/// reproduce bit-identically regardless of how seeds are scheduled across
/// worker threads. Derived draws below are hand-rolled from the raw 64-bit
/// engine output instead of std::*_distribution, whose results are not
/// pinned down by the standard.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Rate-1 exponential variate, strictly positive.
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace stac
