// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// EMB1 embedding container. Layout (all integers little-endian):
//
//   offset  size  field
//   0       4     magic "EMB1"
//   4       2     version (u16, currently 1)
//   6       2     dtype code (u16, 1 = f32)
//   8       8     rows (u64, >= 1)
//   16      8     cols (u64, >= 1)
//   24      4*r*c payload, row-major IEEE-754 binary32, little-endian
//
// The file ends exactly after the payload. Non-finite payload values are
// rejected on read.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cfred/feature_matrix.hpp"

namespace cfred {

inline constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};
inline constexpr std::uint16_t kEmbVersion = 1;
inline constexpr std::uint16_t kEmbDtypeF32 = 1;
inline constexpr std::size_t kEmbHeaderSize = 24;

std::vector<std::uint8_t> encode_embedding(const FeatureMatrix& m);

/// Throws FormatError with the offending byte offset.
FeatureMatrix decode_embedding(std::span<const std::uint8_t> bytes);

void write_embedding(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_embedding(const std::filesystem::path& path);

/// Reads only the header; returns {rows, cols}. Used for cheap row-count
/// validation of manifests.
std::pair<std::uint64_t, std::uint64_t> read_embedding_shape(
    const std::filesystem::path& path);

}  // namespace cfred
