#include "stac/rng.hpp"

#include <cmath>

namespace stac {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_seed(seed, stream)) {}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::exponential() {
  // The +0.5 offset keeps the uniform strictly inside (0, 1), so the
  // variate is finite and strictly positive.
  double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

}  // namespace stac
