// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace cfred {

/// Portable random stream used by every synthetic generator.
///
/// Stream k of seed s is a std::mt19937_64 seeded with
///     splitmix64(s + 0x9E3779B97F4A7C15 * (k + 1))
/// Uniforms take the top 53 bits of one engine output: (u >> 11) * 2^-53.
/// Normals use Box-Muller on two consecutive uniforms u1, u2:
///     r = sqrt(-2 ln(1 - u1)),  z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
/// and hand out z0 then z1. mt19937_64 is fully specified by the C++
/// standard, so any language can reproduce these streams.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Well-known stream ids.
namespace streams {
inline constexpr std::uint64_t kCondition = 0;
inline constexpr std::uint64_t kReal = 1;
inline constexpr std::uint64_t kGenerated = 2;
}  // namespace streams

}  // namespace cfred
