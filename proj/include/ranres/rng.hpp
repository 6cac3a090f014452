#pragma once
#include <cstdint>

namespace ranres {

// Deterministic 64-bit generator (splitmix64). std::mt19937_64 would also be
// reproducible, but the std distributions are not pinned across library
// implementations, so sampling helpers are spelled out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n) without modulo bias (Lemire rejection)
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = -n % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // uniform double in [0, 1) with 53 random bits
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

// Stable sub-stream derivation so modules can draw independently from one seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  Rng r(base ^ (0x632be59bd9b4e019ull * (stream + 1)));
  std::uint64_t s = r.next_u64();
  return s ^ (0x9e3779b97f4a7c15ull * index);
}

}  // namespace ranres
