// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Portable deterministic random numbers. The standard library engines are
// portable but its distributions are not, so uniform and normal variates are
// derived here from a SplitMix64 stream.

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace endogeo {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independent stream for one purpose: the purpose label is hashed (FNV-1a)
/// into the seed so that e.g. scene and drift draws never share state.
inline SplitMix64 make_stream(std::uint64_t seed, std::string_view purpose,
                              std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  SplitMix64 mix(seed ^ h);
  SplitMix64 out(mix.next() ^ (index * 0xd1b54a32d192ed03ull));
  out.next();
  return out;
}

}  // namespace endogeo
