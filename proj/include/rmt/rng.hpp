#pragma once
// Counter-based random number generation (Philox2x64-10).
//
// Every random quantity is a pure function of (seed, stream, index), so any
// matrix entry or Monte Carlo trial can be regenerated independently of
// evaluation order.  Streams partition the key space: by convention each
// logical object (a matrix draw, a trial batch) gets its own stream id and
// indexes its entries with a counter.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace rmt {

namespace detail {

inline void philox2x64_round(std::uint64_t& x0, std::uint64_t& x1,
                             std::uint64_t key) {
  constexpr std::uint64_t mult = 0xD2B74407B1CE6E93ULL;
  const unsigned __int128 prod = static_cast<unsigned __int128>(mult) * x0;
  const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
  const std::uint64_t lo = static_cast<std::uint64_t>(prod);
  x0 = hi ^ key ^ x1;
  x1 = lo;
}

// Philox2x64-10: ten rounds over the 128-bit counter with a Weyl-advanced key.
inline std::uint64_t philox2x64(std::uint64_t ctr0, std::uint64_t ctr1,
                                std::uint64_t key) {
  constexpr std::uint64_t weyl = 0x9E3779B97F4A7C15ULL;
  for (int r = 0; r < 10; ++r) {
    philox2x64_round(ctr0, ctr1, key);
    key += weyl;
  }
  return ctr0;
}

}  // namespace detail

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t index) const {
    return detail::philox2x64(index, stream_, seed_);
  }

  // Uniform on (0,1); never returns an exact endpoint.
  double uniform(std::uint64_t index) const {
    return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via Box-Muller on the uniforms at (2*index, 2*index+1).
  double normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Complex standard normal: E|z|^2 = 1, independent re/im of variance 1/2.
  std::complex<double> cnormal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    const double r = std::sqrt(-std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Derives a child stream id, e.g. per trial inside an operation.
inline std::uint64_t substream(std::uint64_t stream, std::uint64_t child) {
  // SplitMix64 finalizer over the pair; collisions are as unlikely as a
  // 64-bit hash allows.
  std::uint64_t z = stream + 0x9E3779B97F4A7C15ULL * (child + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace rmt
