#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "collar_forge/error.hpp"

namespace collar_forge {

/// Uniform double in [0,1) from the top 53 bits of a 64-bit engine draw.
/// Avoids std::uniform_real_distribution, whose output is library-specific.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Halton sequence with a seeded Cranley-Patterson rotation.
///
/// Seed 0 still applies a rotation; the sequence is a pure function of
/// (dimension, seed, index).
class HaltonSequence {
 public:
  static constexpr std::array<std::uint32_t, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                                            23, 29, 31, 37, 41, 43, 47, 53};

  HaltonSequence(std::size_t dim, std::uint64_t seed) : dim_(dim), shift_(dim) {
    if (dim == 0 || dim > kPrimes.size())
      throw Error(ErrorKind::InvalidArgument,
                  "Halton dimension must be in [1, 16], got " + std::to_string(dim));
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (auto& s : shift_) s = unit_double(rng);
  }

  std::size_t dim() const noexcept { return dim_; }

  static double radical_inverse(std::uint64_t index, std::uint32_t base) {
    double inv_base = 1.0 / base;
    double f = inv_base;
    double r = 0.0;
    while (index > 0) {
      r += f * static_cast<double>(index % base);
      index /= base;
      f *= inv_base;
    }
    return r;
  }

  /// Point `index` of the rotated sequence, each coordinate in [0,1).
  std::vector<double> at(std::uint64_t index) const {
    std::vector<double> u(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
      double v = radical_inverse(index + 1, kPrimes[d]) + shift_[d];
      v -= std::floor(v);
      u[d] = v;
    }
    return u;
  }

  std::vector<std::vector<double>> take(std::size_t count, std::uint64_t offset = 0) const {
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(at(offset + i));
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<double> shift_;
};

}  // namespace collar_forge
