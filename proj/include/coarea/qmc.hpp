#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "coarea/error.hpp"

namespace coarea {

/// SplitMix64 step; used to derive independent stream seeds from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Halton sequence with a seeded Cranley-Patterson rotation per coordinate.
/// point(i) is a pure function of (dimension, seed, i).
class HaltonSequence {
 public:
  static constexpr std::array<unsigned, 16> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

  HaltonSequence(std::size_t dimension, std::uint64_t seed) : shift_(dimension) {
    require(dimension >= 1 && dimension <= primes.size(), Errc::invalid_argument,
            "Halton dimension must be in [1, 16]");
    std::mt19937_64 rng(mix_seed(seed));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (auto& s : shift_) s = u01(rng);
  }

  std::size_t dimension() const { return shift_.size(); }

  void point(std::uint64_t index, std::span<double> out) const {
    // index + 1 skips the all-zero first Halton point
    for (std::size_t d = 0; d < shift_.size(); ++d) {
      double v = radical_inverse(index + 1, primes[d]) + shift_[d];
      out[d] = v >= 1.0 ? v - 1.0 : v;
    }
  }

  static double radical_inverse(std::uint64_t i, unsigned base) {
    const double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
      r += f * static_cast<double>(i % base);
      i /= base;
      f *= inv;
    }
    return r;
  }

 private:
  std::vector<double> shift_;
};

/// Mean and standard error of a replicated estimate.
struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
};

/// Combines independent replicate means into (mean, sd / sqrt(R)).
inline Estimate combine_replicates(std::span<const double> means) {
  require(!means.empty(), Errc::invalid_argument, "no replicates");
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(means.size());
  if (means.size() == 1) return {m, 0.0};
  double ss = 0.0;
  for (double v : means) ss += (v - m) * (v - m);
  const double var = ss / static_cast<double>(means.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(means.size()))};
}

}  // namespace coarea
