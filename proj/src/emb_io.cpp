// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/emb_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "cfred/error.hpp"

namespace cfred {

const char* to_string(FormatErrorKind kind) noexcept {
  switch (kind) {
    case FormatErrorKind::kIo: return "io";
    case FormatErrorKind::kTruncatedHeader: return "truncated-header";
    case FormatErrorKind::kMagicMismatch: return "magic-mismatch";
    case FormatErrorKind::kUnsupportedVersion: return "unsupported-version";
    case FormatErrorKind::kUnsupportedDtype: return "unsupported-dtype";
    case FormatErrorKind::kEmptyShape: return "empty-shape";
    case FormatErrorKind::kSizeOverflow: return "size-overflow";
    case FormatErrorKind::kTruncatedPayload: return "truncated-payload";
    case FormatErrorKind::kTrailingBytes: return "trailing-bytes";
    case FormatErrorKind::kNonFinite: return "non-finite";
  }
  return "unknown";
}

FormatError::FormatError(FormatErrorKind kind, std::uint64_t offset,
                         const std::string& detail)
    : DataError("EMB1 " + std::string(to_string(kind)) + " at byte " +
                std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset),
      detail_(detail) {}

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
  }
  return value;
}

struct Header {
  std::uint64_t rows;
  std::uint64_t cols;
  std::uint64_t payload_bytes;
};

Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEmbHeaderSize) {
    throw FormatError(FormatErrorKind::kTruncatedHeader, bytes.size(),
                      "file has " + std::to_string(bytes.size()) +
                          " bytes, header needs " + std::to_string(kEmbHeaderSize));
  }
  if (std::memcmp(bytes.data(), kEmbMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::kMagicMismatch, 0, "expected magic 'EMB1'");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kEmbVersion) {
    throw FormatError(FormatErrorKind::kUnsupportedVersion, 4,
                      "version " + std::to_string(version) + " (supported: 1)");
  }
  const auto dtype = get_le<std::uint16_t>(bytes, 6);
  if (dtype != kEmbDtypeF32) {
    throw FormatError(FormatErrorKind::kUnsupportedDtype, 6,
                      "dtype code " + std::to_string(dtype) + " (supported: 1 = f32)");
  }
  Header h{get_le<std::uint64_t>(bytes, 8), get_le<std::uint64_t>(bytes, 16), 0};
  if (h.rows == 0) {
    throw FormatError(FormatErrorKind::kEmptyShape, 8, "rows must be >= 1");
  }
  if (h.cols == 0) {
    throw FormatError(FormatErrorKind::kEmptyShape, 16, "cols must be >= 1");
  }
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (h.rows > kMax / h.cols || h.rows * h.cols > (kMax - kEmbHeaderSize) / 4) {
    throw FormatError(FormatErrorKind::kSizeOverflow, 8,
                      "rows * cols * 4 overflows a 64-bit size");
  }
  h.payload_bytes = h.rows * h.cols * 4;
  return h;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(FormatErrorKind::kIo, 0, "cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> encode_embedding(const FeatureMatrix& m) {
  std::vector<std::uint8_t> out;
  out.reserve(kEmbHeaderSize + m.data().size() * 4);
  out.insert(out.end(), std::begin(kEmbMagic), std::end(kEmbMagic));
  put_le<std::uint16_t>(out, kEmbVersion);
  put_le<std::uint16_t>(out, kEmbDtypeF32);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  for (float v : m.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

FeatureMatrix decode_embedding(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes);
  const std::uint64_t available = bytes.size() - kEmbHeaderSize;
  if (available < h.payload_bytes) {
    throw FormatError(FormatErrorKind::kTruncatedPayload, bytes.size(),
                      "payload has " + std::to_string(available) + " bytes, header declares " +
                          std::to_string(h.payload_bytes));
  }
  if (available > h.payload_bytes) {
    throw FormatError(FormatErrorKind::kTrailingBytes, kEmbHeaderSize + h.payload_bytes,
                      std::to_string(available - h.payload_bytes) +
                          " unexpected bytes after payload");
  }
  std::vector<float> values(h.rows * h.cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t offset = kEmbHeaderSize + 4 * i;
    values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
    if (!std::isfinite(values[i])) {
      throw FormatError(FormatErrorKind::kNonFinite, offset,
                        "row " + std::to_string(i / h.cols) + ", col " +
                            std::to_string(i % h.cols));
    }
  }
  return FeatureMatrix(h.rows, h.cols, std::move(values));
}

void write_embedding(const std::filesystem::path& path, const FeatureMatrix& m) {
  const auto bytes = encode_embedding(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError(FormatErrorKind::kIo, 0, "cannot create '" + path.string() + "'");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FormatError(FormatErrorKind::kIo, 0, "short write to '" + path.string() + "'");
  }
}

FeatureMatrix read_embedding(const std::filesystem::path& path) {
  try {
    return decode_embedding(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
  }
}

std::pair<std::uint64_t, std::uint64_t> read_embedding_shape(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(FormatErrorKind::kIo, 0, "cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> header(kEmbHeaderSize);
  in.read(reinterpret_cast<char*>(header.data()), kEmbHeaderSize);
  header.resize(static_cast<std::size_t>(in.gcount()));
  const Header h = parse_header(header);
  return {h.rows, h.cols};
}

}  // namespace cfred
