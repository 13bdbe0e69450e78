// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#pragma once

#include <string>
#include <string_view>

namespace cfred {

enum class Direction { kLowerBetter, kHigherBetter };

inline const char* to_string(Direction d) noexcept {
  return d == Direction::kLowerBetter ? "lower" : "higher";
}

/// Accepts "lower"/"higher" and the long forms "lower-better"/"higher-better".
Direction parse_direction(std::string_view text);

}  // namespace cfred
