// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cfred {

/// Coarse classification used to map failures onto CLI exit codes and C API
/// status values.
enum class ErrorCategory {
  kUsage,      // bad flags or arguments
  kData,       // malformed, mismatched or degenerate input
  kNumerical,  // linear algebra could not produce a meaningful result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorCategory::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorCategory::kData, what) {}
};

/// Too few samples to estimate the requested statistic.
class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};

/// Inputs that must be paired row-by-row (or share a condition set) do not.
class PairingError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// A matrix expected to be positive semi-definite has an eigenvalue below the
/// clamp threshold.
class NotPsdError : public Error {
 public:
  NotPsdError(const std::string& what, double worst_eigenvalue)
      : Error(ErrorCategory::kNumerical, what),
        worst_eigenvalue_(worst_eigenvalue) {}

  double worst_eigenvalue() const noexcept { return worst_eigenvalue_; }

 private:
  double worst_eigenvalue_;
};

/// Correlation over a zero-variance column.
class UndefinedCorrelationError : public Error {
 public:
  explicit UndefinedCorrelationError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

enum class FormatErrorKind {
  kIo,
  kTruncatedHeader,
  kMagicMismatch,
  kUnsupportedVersion,
  kUnsupportedDtype,
  kEmptyShape,
  kSizeOverflow,
  kTruncatedPayload,
  kTrailingBytes,
  kNonFinite,
};

const char* to_string(FormatErrorKind kind) noexcept;

/// Malformed EMB1 container. `offset` is the byte offset of the offending
/// field or value.
class FormatError : public DataError {
 public:
  FormatError(FormatErrorKind kind, std::uint64_t offset,
              const std::string& detail);

  FormatErrorKind kind() const noexcept { return kind_; }
  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  FormatErrorKind kind_;
  std::uint64_t offset_;
  std::string detail_;
};

class ManifestError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cfred
