#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace coarse {

// Global comparison tolerance. All constructions are piecewise-affine, so
// rounding error stays at interpolation level and never compounds past this.
inline constexpr double kTol = 1e-9;

// Default seed for every sampled verification plan; reports must be
// reproducible byte for byte.
inline constexpr std::uint64_t kDefaultSeed = 0xC0A45E;

// Deterministic random source. std::mt19937_64 has a standardized output
// sequence; the index/real mappings below avoid std::uniform_*_distribution,
// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform index in [0, n).
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::next_index: empty range");
#ifdef __SIZEOF_INT128__
    const auto wide = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::size_t>(wide >> 64);
#else
    return static_cast<std::size_t>(engine_() % n);
#endif
  }

 private:
  std::mt19937_64 engine_;
};

// Enumeration plan shared by the pair/triple/quadruple verifiers: exhaustive
// for small point sets, fixed-seed sampling otherwise.
struct SamplePlan {
  bool exhaustive = true;
  std::size_t samples = 0;
  std::uint64_t seed = kDefaultSeed;

  static SamplePlan exhaustive_plan() { return {true, 0, kDefaultSeed}; }
  static SamplePlan sampled(std::size_t n, std::uint64_t seed = kDefaultSeed) {
    return {false, n, seed};
  }
};

}  // namespace coarse
