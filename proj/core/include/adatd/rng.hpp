#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace adatd {

// splitmix64 finalizer (Steele/Lea/Vigna). Used for seed mixing only.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-cell stream seed for the (algorithm, seed-index) grid. Three mix64
// hops make the streams independent of scheduling order:
//   s = mix64(master)
//   s = mix64(s ^ (golden * (algo_index + 1)))
//   s = mix64(s ^ (0xd1b54a32d192ed03 * (seed_index + 1)))
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t algo_index,
                                        std::uint64_t seed_index) {
  std::uint64_t s = mix64(master_seed);
  s = mix64(s ^ (0x9e3779b97f4a7c15ULL * (algo_index + 1)));
  s = mix64(s ^ (0xd1b54a32d192ed03ULL * (seed_index + 1)));
  return s;
}

// mt19937_64 with hand-rolled value conversions. The raw engine output is
// specified by the standard, and the conversions below avoid the
// implementation-defined std::*_distribution, so streams are reproducible
// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // 53-bit uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform strictly inside (0, 1); never returns an endpoint.
  double uniform_open01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased uniform over {0, ..., n-1} via rejection.
  int uniform_int(int n) {
    const auto bound = static_cast<std::uint64_t>(n);
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (kMax % bound + 1) % bound;  // 2^64 mod n
    std::uint64_t x = engine_();
    while (rem != 0 && x > kMax - rem) x = engine_();
    return static_cast<int>(x % bound);
  }

  // Standard normal via Box-Muller on the portable uniforms.
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adatd
