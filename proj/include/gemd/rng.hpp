#ifndef GEMD_RNG_HPP
#define GEMD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gemd {

// Deterministic random stream. The engine is std::mt19937_64, whose bit
// output is fixed by the standard; all distribution transforms are done here
// by hand so that draws are identical across standard libraries and runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, bound), bound >= 1. Rejection sampling.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  // Standard normal via Box-Muller (stateless variant; one draw per call).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Random +-1 sign.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 mix step; used to derive independent sub-stream seeds from a
// base seed without overlap between small consecutive bases.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gemd

#endif  // GEMD_RNG_HPP
